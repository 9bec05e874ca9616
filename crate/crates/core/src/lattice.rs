//! Euclidean lattices with exact-rational Gram matrices and their
//! degree-theoretic invariants.
//!
//! A lattice here is the free module `Z^n` equipped with a symmetric
//! positive-definite rational Gram matrix. All structural quantities are
//! exact: determinants, squared minima, slopes as symbolic logarithms
//! ([`ExactLn`]), and witnesses as integer coordinate vectors. Reporting
//! converts to [`LogValue`] (a double plus a rigorous error radius) at the
//! boundary only.
//!
//! Degrees follow the covolume normalization: `degree = -1/2 log det(gram)`,
//! `slope = degree / rank`, and the upper degree is the negated half-log of
//! the squared first minimum. The maximal slope over sublattices is computed
//! exactly for ambient rank at most 3 through a certified enumeration radius
//! (rank-1 candidates come from shortest vectors, rank-2 candidates from
//! vector pairs inside the radius, and the full lattice covers rank 3);
//! larger ranks either use a caller-supplied search radius, which yields a
//! certified lower bound, or are refused.

use crate::enclosure::{psi_fn, ExactLn, LogValue};
use crate::enumerate::{
    self, BudgetExceeded, EnumOpts,
};
use crate::linalg::{self, QMat, ZMat};
use crate::rational::{q, rational_root_upper, Q, Z};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("gram matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ")]
    NotSymmetric { i: usize, j: usize },
    #[error("gram matrix is not positive definite: leading principal minor of order {order} is not positive")]
    NotPositiveDefinite { order: usize },
    #[error("operation requires positive rank")]
    ZeroRank,
    #[error("exact maximal slope is certified only for ambient rank <= 3, got rank {rank}; use a search radius for a certified lower bound")]
    RankTooLargeForExact { rank: usize },
    #[error("sublattice basis does not have full column rank")]
    DependentBasis,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// `Z^rank` with an exact positive-definite Gram matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EuclideanLattice {
    rank: usize,
    gram: QMat,
}

impl EuclideanLattice {
    /// Validates symmetry and positive-definiteness (rank 0 is legal).
    pub fn new(gram: QMat) -> Result<Self, LatticeError> {
        assert_eq!(gram.nrows(), gram.ncols(), "gram matrix must be square");
        if let Some((i, j)) = gram.asymmetry_witness() {
            return Err(LatticeError::NotSymmetric { i, j });
        }
        if let Err(p) = gram.ldlt() {
            return Err(LatticeError::NotPositiveDefinite { order: p + 1 });
        }
        Ok(EuclideanLattice {
            rank: gram.nrows(),
            gram,
        })
    }

    /// The standard lattice `Z^n`.
    pub fn standard(n: usize) -> Self {
        EuclideanLattice {
            rank: n,
            gram: QMat::identity(n),
        }
    }

    /// Rank-1 lattice whose generator has the given squared norm.
    pub fn rank1(norm_sq: Q) -> Result<Self, LatticeError> {
        EuclideanLattice::new(QMat::from_rows(vec![vec![norm_sq]]))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn gram(&self) -> &QMat {
        &self.gram
    }

    /// Determinant of the Gram matrix (squared covolume), exact.
    pub fn det(&self) -> Q {
        self.gram.det()
    }

    /// Squared norm of an integer vector.
    pub fn norm_sq(&self, v: &[Z]) -> Q {
        let vq: Vec<Q> = v.iter().map(|x| Q::from_integer(x.clone())).collect();
        linalg::gram_quad(&self.gram, &vq)
    }

    /// Squared norm of a rational point of the ambient space.
    pub fn norm_sq_point(&self, v: &[Q]) -> Q {
        linalg::gram_quad(&self.gram, v)
    }

    /// Inner product of two rational points.
    pub fn inner(&self, a: &[Q], b: &[Q]) -> Q {
        linalg::gram_pair(&self.gram, a, b)
    }

    /// Arithmetic degree `-1/2 log det`, as an exact symbolic logarithm.
    pub fn degree_exact(&self) -> ExactLn {
        ExactLn::mul_ln(q(-1, 2), self.det())
    }

    pub fn degree(&self) -> LogValue {
        self.degree_exact()
            .to_logvalue(crate::enclosure::precision_bits())
    }

    /// Slope `degree / rank`.
    pub fn slope_exact(&self) -> Result<ExactLn, LatticeError> {
        if self.rank == 0 {
            return Err(LatticeError::ZeroRank);
        }
        Ok(self
            .degree_exact()
            .scale(&Q::new(Z::one(), Z::from(self.rank))))
    }

    pub fn slope(&self) -> Result<LogValue, LatticeError> {
        Ok(self
            .slope_exact()?
            .to_logvalue(crate::enclosure::precision_bits()))
    }

    /// Dual lattice: Gram matrix is the exact inverse.
    pub fn dual(&self) -> EuclideanLattice {
        let inv = self
            .gram
            .inverse()
            .expect("positive-definite matrices are invertible");
        EuclideanLattice {
            rank: self.rank,
            gram: inv,
        }
    }

    /// Orthogonal direct sum (block-diagonal Gram).
    pub fn direct_sum(&self, other: &EuclideanLattice) -> EuclideanLattice {
        EuclideanLattice {
            rank: self.rank + other.rank,
            gram: self.gram.direct_sum(&other.gram),
        }
    }

    /// Tensor product (Kronecker Gram); basis vector `e_a (x) f_b` has index
    /// `a * other.rank + b`.
    pub fn tensor(&self, other: &EuclideanLattice) -> EuclideanLattice {
        EuclideanLattice {
            rank: self.rank * other.rank,
            gram: self.gram.kron(&other.gram),
        }
    }

    /// Rescale the metric by a positive rational factor: `gram -> c * gram`.
    pub fn scale_metric(&self, c: &Q) -> EuclideanLattice {
        assert!(c.is_positive(), "metric scale must be positive");
        EuclideanLattice {
            rank: self.rank,
            gram: self.gram.scale(c),
        }
    }

    /// All nonzero vectors with squared norm at most `bound_sq`, sorted
    /// lexicographically.
    pub fn shortest_vectors(
        &self,
        bound_sq: &Q,
        opts: &EnumOpts,
    ) -> Result<Vec<Vec<Z>>, LatticeError> {
        assert!(!bound_sq.is_negative(), "bound must be nonnegative");
        if self.rank == 0 {
            return Ok(Vec::new());
        }
        let zeros = vec![Q::zero(); self.rank];
        let within = enumerate::vectors_within(&self.gram, &zeros, bound_sq, opts)?;
        let mut vecs: Vec<Vec<Z>> = within
            .points
            .into_iter()
            .map(|(v, _)| v)
            .filter(|v| !v.iter().all(Zero::is_zero))
            .collect();
        vecs.sort();
        Ok(vecs)
    }

    /// Exact squared first minimum.
    pub fn lambda1_sq(&self, opts: &EnumOpts) -> Result<Q, LatticeError> {
        if self.rank == 0 {
            return Err(LatticeError::ZeroRank);
        }
        Ok(enumerate::lambda1_sq(&self.gram, opts)?)
    }

    /// All minimal nonzero vectors (kissing set), sorted lexicographically.
    pub fn minimal_vectors(&self, opts: &EnumOpts) -> Result<Vec<Vec<Z>>, LatticeError> {
        if self.rank == 0 {
            return Err(LatticeError::ZeroRank);
        }
        Ok(enumerate::shortest_vectors(&self.gram, opts)?.minimizers)
    }

    /// Upper degree `-1/2 log lambda1^2` (a minimal vector is primitive, so
    /// this is the maximal degree of a rank-1 subbundle).
    pub fn udeg_exact(&self, opts: &EnumOpts) -> Result<ExactLn, LatticeError> {
        let l1 = self.lambda1_sq(opts)?;
        Ok(ExactLn::mul_ln(q(-1, 2), l1))
    }

    pub fn udeg(&self, opts: &EnumOpts) -> Result<LogValue, LatticeError> {
        Ok(self
            .udeg_exact(opts)?
            .to_logvalue(crate::enclosure::precision_bits()))
    }
}

/// A sublattice given by an integer column basis inside an ambient lattice.
#[derive(Debug, Clone)]
pub struct Sublattice {
    pub ambient: EuclideanLattice,
    pub basis: ZMat,
    saturated: bool,
}

impl Sublattice {
    pub fn new(ambient: EuclideanLattice, basis: ZMat) -> Result<Self, LatticeError> {
        assert_eq!(basis.nrows(), ambient.rank(), "basis rows must match ambient rank");
        if basis.rank() != basis.ncols() {
            return Err(LatticeError::DependentBasis);
        }
        let saturated = linalg::is_saturated(&basis);
        Ok(Sublattice {
            ambient,
            basis,
            saturated,
        })
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    /// Whether the quotient by this sublattice is torsion-free.
    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    /// The sublattice as a lattice in its own right (restricted metric).
    pub fn induced_lattice(&self) -> EuclideanLattice {
        let b = self.basis.to_qmat();
        let gram = self.ambient.gram().pullback(&b);
        EuclideanLattice {
            rank: b.ncols(),
            gram,
        }
    }

    /// Smallest saturated sublattice containing this one.
    pub fn saturate(&self) -> Sublattice {
        if self.saturated {
            return self.clone();
        }
        let sat = linalg::saturation(&self.basis);
        Sublattice {
            ambient: self.ambient.clone(),
            basis: sat,
            saturated: true,
        }
    }

    /// Index of the sublattice inside its saturation.
    pub fn index_in_saturation(&self) -> Z {
        self.basis
            .elementary_divisors()
            .into_iter()
            .product()
    }

    pub fn slope_exact(&self) -> Result<ExactLn, LatticeError> {
        self.induced_lattice().slope_exact()
    }
}

/// How to compute the maximal slope.
#[derive(Debug, Clone)]
pub enum MuMaxMethod {
    /// Exact answer; refused beyond ambient rank 3.
    Exact,
    /// Certified lower bound from candidates within the given squared
    /// enumeration radius.
    Search { radius_sq: Q },
}

/// Maximal slope over sublattices, with a witness.
#[derive(Debug, Clone)]
pub struct MuMaxResult {
    /// The (exact) maximal slope, or a certified lower bound in search mode.
    pub value: ExactLn,
    /// Whether `value` is the exact maximum.
    pub certified_exact: bool,
    /// Squared enumeration radius used for rank-2 candidates, if any.
    pub radius_sq: Option<Q>,
    /// Column basis of a saturated sublattice attaining `value`.
    pub witness: ZMat,
}

impl MuMaxResult {
    pub fn to_logvalue(&self) -> LogValue {
        self.value.to_logvalue(crate::enclosure::precision_bits())
    }
}

/// Negate `v` if its first nonzero entry is negative.
fn sign_normalize(mut v: Vec<Z>) -> Vec<Z> {
    if let Some(first) = v.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in v.iter_mut() {
                *x = -std::mem::take(x);
            }
        }
    }
    v
}

/// Scan rank-1 and rank-2 sublattice candidates built from vectors of
/// squared norm at most `radius_sq`, plus the full lattice, and return the
/// best (slope, witness). Deterministic tie-break: among equal slopes, the
/// witness of largest rank wins (the sublattices attaining the maximal slope
/// are closed under sum, so the maximal-rank one is canonical), then the
/// first candidate in the sorted scan order.
fn mu_max_scan(
    e: &EuclideanLattice,
    radius_sq: &Q,
    opts: &EnumOpts,
) -> Result<(ExactLn, ZMat), LatticeError> {
    use std::cmp::Ordering;
    let n = e.rank();
    // Incumbent: the full lattice.
    let mut best = e.slope_exact()?;
    let mut witness = ZMat::identity(n);

    let consider = |s: ExactLn, basis: ZMat, best: &mut ExactLn, witness: &mut ZMat| {
        match s.cmp_exact(best) {
            Ordering::Greater => {
                *best = s;
                *witness = basis;
            }
            Ordering::Equal if basis.ncols() > witness.ncols() => {
                *witness = basis;
            }
            _ => {}
        }
    };

    // Rank-1 candidates: minimal vectors (always optimal among rank 1 —
    // any primitive vector of minimal norm maximizes -1/2 log |v|^2).
    let minimal = e.minimal_vectors(opts)?;
    let l1 = e.norm_sq(&minimal[0]);
    let rank1 = ExactLn::mul_ln(q(-1, 2), l1.clone());
    consider(
        rank1,
        ZMat::from_cols(vec![sign_normalize(minimal[0].clone())]),
        &mut best,
        &mut witness,
    );

    // Rank-2 candidates from pairs within the radius (skip when the ambient
    // rank is 2: the only saturated rank-2 sublattice is the lattice itself).
    if n >= 3 {
        let shorts = e.shortest_vectors(radius_sq, opts)?;
        for i in 0..shorts.len() {
            for j in (i + 1)..shorts.len() {
                let bmat = ZMat::from_cols(vec![shorts[i].clone(), shorts[j].clone()]);
                if bmat.rank() != 2 {
                    continue;
                }
                let sat = linalg::saturation(&bmat);
                let s = Sublattice {
                    ambient: e.clone(),
                    basis: sat.clone(),
                    saturated: true,
                }
                .slope_exact()?;
                consider(s, sat, &mut best, &mut witness);
            }
        }
    }
    Ok((best, witness))
}

/// Maximal slope over (saturated) sublattices.
///
/// `Exact` is certified for ambient rank at most 3: rank-1 maximizers are
/// shortest vectors; a rank-2 maximizer `F` with slope at least the full
/// slope has reduced basis vectors of squared norm at most
/// `(4/3) det^(2/n) / lambda1^2` (its covolume is at most `det^(1/n)` and
/// its first minimum is at least the ambient one); rank 3 is the lattice
/// itself. For larger ambient rank, `Search` scans the same candidate
/// classes inside a caller-chosen radius and certifies only a lower bound.
pub fn mu_max(
    e: &EuclideanLattice,
    method: &MuMaxMethod,
    opts: &EnumOpts,
) -> Result<MuMaxResult, LatticeError> {
    let n = e.rank();
    if n == 0 {
        return Err(LatticeError::ZeroRank);
    }
    match method {
        MuMaxMethod::Exact => {
            if n > 3 {
                return Err(LatticeError::RankTooLargeForExact { rank: n });
            }
            if n <= 2 {
                // Rank-2 pairs are not needed; pass a zero radius.
                let (value, witness) = mu_max_scan(e, &Q::zero(), opts)?;
                return Ok(MuMaxResult {
                    value,
                    certified_exact: true,
                    radius_sq: None,
                    witness,
                });
            }
            // Certified radius for rank-2 maximizers:
            // lambda2(F) <= (2/sqrt 3) covol(F) / lambda1(F)
            //            <= (2/sqrt 3) det(E)^(1/n) / lambda1(E).
            let l1 = e.lambda1_sq(opts)?;
            let det_pow = rational_root_upper(&(e.det() * e.det()), n as u32);
            let radius_sq = q(4, 3) * det_pow / l1;
            let (value, witness) = mu_max_scan(e, &radius_sq, opts)?;
            Ok(MuMaxResult {
                value,
                certified_exact: true,
                radius_sq: Some(radius_sq),
                witness,
            })
        }
        MuMaxMethod::Search { radius_sq } => {
            let (value, witness) = mu_max_scan(e, radius_sq, opts)?;
            Ok(MuMaxResult {
                value,
                certified_exact: n <= 2,
                radius_sq: Some(radius_sq.clone()),
                witness,
            })
        }
    }
}

/// Minimal slope `mu_min(E) = -mu_max(dual E)` over admissible quotients.
pub fn mu_min(
    e: &EuclideanLattice,
    method: &MuMaxMethod,
    opts: &EnumOpts,
) -> Result<MuMaxResult, LatticeError> {
    let r = mu_max(&e.dual(), method, opts)?;
    Ok(MuMaxResult {
        value: r.value.neg(),
        certified_exact: r.certified_exact,
        radius_sq: r.radius_sq,
        witness: r.witness,
    })
}

/// Hom lattice `Hom(F, G)` with the Hilbert–Schmidt metric: equals
/// `tensor(dual(F), G)` under the fixed index convention (the elementary map
/// `f_j -> g_i` has index `j * rank(G) + i`).
pub fn hom_lattice(f: &EuclideanLattice, g: &EuclideanLattice) -> EuclideanLattice {
    f.dual().tensor(g)
}

/// The slope-comparison function `psi(r) = (1/r) log Gamma(r/2 + 1)
/// - (1/2) log(pi/4)`: `-(1/r) log v_r + ... ` normalized so `psi(1) = 0`,
/// increasing, and `psi(r) < (1/2) log r` for `r > 1`.
pub fn psi(r: u64) -> LogValue {
    assert!(r >= 1);
    LogValue::from_enc(&psi_fn(r, crate::enclosure::precision_bits()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, zi};
    use std::cmp::Ordering;

    fn a2() -> EuclideanLattice {
        EuclideanLattice::new(QMat::from_int_rows(&[&[2, -1], &[-1, 2]])).unwrap()
    }

    fn opts() -> EnumOpts {
        EnumOpts::default()
    }

    #[test]
    fn construction_validates() {
        assert!(EuclideanLattice::new(QMat::from_int_rows(&[&[1]])).is_ok());
        assert!(a2().rank() == 2);
        let bad = EuclideanLattice::new(QMat::from_int_rows(&[&[1, 2], &[2, 1]]));
        assert_eq!(
            bad.unwrap_err(),
            LatticeError::NotPositiveDefinite { order: 2 }
        );
        let asym = EuclideanLattice::new(QMat::from_int_rows(&[&[1, 2], &[3, 1]]));
        assert_eq!(asym.unwrap_err(), LatticeError::NotSymmetric { i: 0, j: 1 });
        // Rank 0 is legal with degree 0.
        let e0 = EuclideanLattice::new(QMat::zeros(0, 0)).unwrap();
        assert!(e0.degree_exact().is_zero());
    }

    #[test]
    fn degrees_and_slopes() {
        let z = EuclideanLattice::standard(1);
        assert!(z.degree_exact().is_zero());
        assert!(EuclideanLattice::standard(2).degree_exact().is_zero());
        // deg A2 = -1/2 log 3.
        let d = a2().degree_exact();
        assert_eq!(
            d.cmp_exact(&ExactLn::mul_ln(q(-1, 2), qi(3))),
            Ordering::Equal
        );
        let lv = a2().degree();
        assert!((lv.value - (-0.5493061443340549)).abs() < 1e-12);
        // slope(Z (+) A2) = -(1/6) log 3.
        let s = z.direct_sum(&a2()).slope_exact().unwrap();
        assert_eq!(
            s.cmp_exact(&ExactLn::mul_ln(q(-1, 6), qi(3))),
            Ordering::Equal
        );
        // Degree additivity.
        let e1 = a2();
        let e2 = EuclideanLattice::new(QMat::from_int_rows(&[&[5]])).unwrap();
        let sum = e1.direct_sum(&e2);
        assert_eq!(
            sum.degree_exact()
                .cmp_exact(&e1.degree_exact().add(&e2.degree_exact())),
            Ordering::Equal
        );
    }

    #[test]
    fn dual_is_involutive() {
        let d = a2().dual();
        assert_eq!(d.gram().at(0, 0), &q(2, 3));
        assert_eq!(d.gram().at(0, 1), &q(1, 3));
        assert_eq!(a2().dual().dual(), a2());
        // Dual degree is the negated degree.
        assert_eq!(
            d.degree_exact().cmp_exact(&a2().degree_exact().neg()),
            Ordering::Equal
        );
    }

    #[test]
    fn hom_and_tensor() {
        let z = EuclideanLattice::standard(1);
        assert_eq!(hom_lattice(&z, &z).gram(), &QMat::identity(1));
        let f = EuclideanLattice::rank1(q(1, 3)).unwrap();
        let h = hom_lattice(&f, &a2());
        assert_eq!(h.gram(), &a2().gram().scale(&qi(3)));
        let z2 = EuclideanLattice::standard(2);
        assert_eq!(z2.tensor(&z2).gram(), &QMat::identity(4));
        // hom = tensor(dual, G) literally.
        let g = a2();
        let f2 = EuclideanLattice::new(QMat::from_int_rows(&[&[3, 1], &[1, 2]])).unwrap();
        assert_eq!(hom_lattice(&f2, &g), f2.dual().tensor(&g));
    }

    #[test]
    fn shortest_vector_lists() {
        let z2 = EuclideanLattice::standard(2);
        let v = z2.shortest_vectors(&qi(1), &opts()).unwrap();
        assert_eq!(v.len(), 4);
        let v2 = a2().shortest_vectors(&qi(2), &opts()).unwrap();
        assert_eq!(
            v2,
            vec![
                vec![zi(-1), zi(-1)],
                vec![zi(-1), zi(0)],
                vec![zi(0), zi(-1)],
                vec![zi(0), zi(1)],
                vec![zi(1), zi(0)],
                vec![zi(1), zi(1)],
            ]
        );
        assert!(a2().shortest_vectors(&qi(1), &opts()).unwrap().is_empty());
    }

    #[test]
    fn lambda1_and_udeg() {
        assert_eq!(EuclideanLattice::standard(3).lambda1_sq(&opts()).unwrap(), qi(1));
        assert_eq!(a2().lambda1_sq(&opts()).unwrap(), qi(2));
        // Homogeneity under metric scaling.
        let c = q(7, 5);
        assert_eq!(
            a2().scale_metric(&c).lambda1_sq(&opts()).unwrap(),
            c * qi(2)
        );
        // udeg(A2) = -1/2 log 2.
        let u = a2().udeg_exact(&opts()).unwrap();
        assert_eq!(
            u.cmp_exact(&ExactLn::mul_ln(q(-1, 2), qi(2))),
            Ordering::Equal
        );
        // Tensoring with a rank-1 lattice of squared norm c shifts udeg by
        // -1/2 log c.
        let l = EuclideanLattice::rank1(qi(5)).unwrap();
        let shifted = a2().tensor(&l).udeg_exact(&opts()).unwrap();
        assert_eq!(
            shifted.cmp_exact(&u.add(&ExactLn::mul_ln(q(-1, 2), qi(5)))),
            Ordering::Equal
        );
    }

    #[test]
    fn sublattice_basics() {
        let z2 = EuclideanLattice::standard(2);
        let b = ZMat::from_cols(vec![vec![zi(2), zi(2)]]);
        let s = Sublattice::new(z2.clone(), b).unwrap();
        assert!(!s.is_saturated());
        assert_eq!(s.index_in_saturation(), zi(2));
        let sat = s.saturate();
        assert!(sat.is_saturated());
        assert_eq!(sat.induced_lattice().gram().at(0, 0), &qi(2));
        let dep = ZMat::from_cols(vec![vec![zi(1), zi(1)], vec![zi(2), zi(2)]]);
        assert_eq!(
            Sublattice::new(z2, dep).unwrap_err(),
            LatticeError::DependentBasis
        );
    }

    #[test]
    fn mu_max_small_ranks() {
        // Z^2 is semistable of slope 0.
        let r = mu_max(&EuclideanLattice::standard(2), &MuMaxMethod::Exact, &opts()).unwrap();
        assert!(r.certified_exact);
        assert!(r.value.is_zero());
        // A2: full slope -1/4 log 3 beats the rank-1 optimum -1/2 log 2.
        let r2 = mu_max(&a2(), &MuMaxMethod::Exact, &opts()).unwrap();
        assert_eq!(
            r2.value.cmp_exact(&ExactLn::mul_ln(q(-1, 4), qi(3))),
            Ordering::Equal
        );
        assert_eq!(r2.witness, ZMat::identity(2));
        // Rank 1: its own slope.
        let l = EuclideanLattice::rank1(q(9, 4)).unwrap();
        let r3 = mu_max(&l, &MuMaxMethod::Exact, &opts()).unwrap();
        assert_eq!(
            r3.value.cmp_exact(&l.slope_exact().unwrap()),
            Ordering::Equal
        );
        // A lattice whose maximal slope comes from a rank-1 sublattice:
        // diag(1/4, 9): shortest vector has norm 1/2, slope log 2 > full
        // slope -1/4 log(9/4).
        let g = QMat::from_rows(vec![vec![q(1, 4), qi(0)], vec![qi(0), qi(9)]]);
        let e = EuclideanLattice::new(g).unwrap();
        let r4 = mu_max(&e, &MuMaxMethod::Exact, &opts()).unwrap();
        assert_eq!(
            r4.value.cmp_exact(&ExactLn::mul_ln(q(-1, 2), q(1, 4))),
            Ordering::Equal
        );
        assert_eq!(r4.witness, ZMat::from_cols(vec![vec![zi(1), zi(0)]]));
    }

    #[test]
    fn mu_max_rank3_and_guardrails() {
        // Diagonal (1, 1, 4): best sublattice is Z^2, slope 0.
        let e = EuclideanLattice::new(QMat::from_int_rows(&[
            &[1, 0, 0],
            &[0, 1, 0],
            &[0, 0, 4],
        ]))
        .unwrap();
        let r = mu_max(&e, &MuMaxMethod::Exact, &opts()).unwrap();
        assert!(r.certified_exact);
        assert!(r.value.is_zero());
        assert_eq!(r.witness.ncols(), 2);
        // Rank 4 exact is refused.
        let e4 = EuclideanLattice::standard(4);
        assert_eq!(
            mu_max(&e4, &MuMaxMethod::Exact, &opts()).unwrap_err(),
            LatticeError::RankTooLargeForExact { rank: 4 }
        );
        // Search mode yields a certified lower bound (here the true value 0).
        let rs = mu_max(
            &e4,
            &MuMaxMethod::Search { radius_sq: qi(2) },
            &opts(),
        )
        .unwrap();
        assert!(!rs.certified_exact);
        assert!(rs.value.is_zero());
        assert_eq!(rs.radius_sq, Some(qi(2)));
        // mu_min(Z^n) = 0 via the dual.
        let rm = mu_min(&e4, &MuMaxMethod::Search { radius_sq: qi(2) }, &opts()).unwrap();
        assert!(rm.value.is_zero());
    }

    #[test]
    fn minkowski_bound_on_small_lattices() {
        // 1/2 log lambda1^2 <= -slope + psi(rank), checked through sound
        // enclosures on a basket of lattices.
        let bits = 128;
        let cases = vec![
            EuclideanLattice::standard(2),
            a2(),
            EuclideanLattice::new(QMat::from_int_rows(&[
                &[2, -1, 0],
                &[-1, 2, -1],
                &[0, -1, 2],
            ]))
            .unwrap(),
            EuclideanLattice::new(QMat::from_int_rows(&[&[5, 2], &[2, 4]])).unwrap(),
        ];
        for e in cases {
            let lhs = ExactLn::half_ln(e.lambda1_sq(&opts()).unwrap()).to_enc(bits);
            let rhs = e
                .slope_exact()
                .unwrap()
                .neg()
                .to_enc(bits)
                .add(&psi_fn(e.rank() as u64, bits));
            assert!(lhs.lo <= rhs.hi, "Minkowski violated for {:?}", e);
        }
    }

    #[test]
    fn finite_index_slope_inequality() {
        // mu_min(E) <= mu_min(F) + log(m)/rk for F of full rank and index m:
        // equality for F = 2Z inside Z.
        let z = EuclideanLattice::standard(1);
        let f = EuclideanLattice::rank1(qi(4)).unwrap();
        let mm_e = mu_min(&z, &MuMaxMethod::Exact, &opts()).unwrap().value;
        let mm_f = mu_min(&f, &MuMaxMethod::Exact, &opts()).unwrap().value;
        let rhs = mm_f.add(&ExactLn::ln(qi(2)));
        assert_ne!(mm_e.cmp_exact(&rhs), Ordering::Greater);
        assert_eq!(mm_e.cmp_exact(&rhs), Ordering::Equal);
    }

    #[test]
    fn psi_reporting() {
        let p1 = psi(1);
        assert!(p1.value.abs() <= p1.abs_error + 1e-30);
        let p2 = psi(2);
        assert!((p2.value - 0.12078223763524522).abs() < 1e-12);
        assert!(psi(3).value < psi(4).value);
    }
}
