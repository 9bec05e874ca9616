//! Reduction theory for Euclidean lattices: full flags of saturated
//! sublattices, the reduced and dual-reduced flags built from successive
//! shortest vectors, flag-adapted splittings into lines, the slope-defect
//! invariant with its explicit rank-dependent bounds, operator norms of
//! the splitting sum map, and the almost-invariance bracket for distances
//! under scalar extension to a ring of integers.

use crate::enclosure::Enc;
use crate::enclosure::ExactLn;
use crate::enumerate::{self, BudgetExceeded, EnumOpts};
use crate::lattice::{EuclideanLattice, LatticeError};
use crate::linalg::{self, QMat, ZMat};
use crate::numberfield::{FieldError, NumberFieldData};
use crate::poly::{self, Poly};
use crate::rational::{Q, Z};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ReductionError {
    #[error("generators are linearly dependent")]
    DependentGenerators,
    #[error("generators are independent but do not form a basis of the ambient lattice")]
    NotBasis,
    #[error("invalid flag: {0}")]
    BadFlag(String),
    #[error("operator-norm report is certified only for rank <= {cap}, got {rank}")]
    RankCapExceeded { rank: usize, cap: usize },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<BudgetExceeded> for ReductionError {
    fn from(e: BudgetExceeded) -> Self {
        ReductionError::Lattice(LatticeError::from(e))
    }
}

/// Largest certified rank for the operator-norm report (exact
/// characteristic polynomials stay cheap up to this size).
pub const SIGMA_RANK_CAP: usize = 8;

// ---------------------------------------------------------------------------
// Flags
// ---------------------------------------------------------------------------

/// A full flag of saturated sublattices `0 = L_0 < L_1 < ... < L_n = E`,
/// one of each rank. Bases are stored as column-style Hermite normal
/// forms, so equal sublattice chains compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Flag {
    e: EuclideanLattice,
    bases: Vec<ZMat>,
}

impl Flag {
    pub fn new(e: EuclideanLattice, bases: Vec<ZMat>) -> Result<Flag, ReductionError> {
        let n = e.rank();
        if bases.len() != n + 1 {
            return Err(ReductionError::BadFlag(format!(
                "expected {} nested sublattices, got {}",
                n + 1,
                bases.len()
            )));
        }
        let mut normalized = Vec::with_capacity(n + 1);
        for (i, b) in bases.iter().enumerate() {
            if b.nrows() != n || b.ncols() != i {
                return Err(ReductionError::BadFlag(format!(
                    "level {} must be an {} x {} column basis",
                    i, n, i
                )));
            }
            if i > 0 && !linalg::is_saturated(b) {
                return Err(ReductionError::BadFlag(format!(
                    "level {} is not a saturated sublattice",
                    i
                )));
            }
            let (h, _) = b.hnf_col();
            normalized.push(h);
        }
        for i in 0..n {
            for j in 0..i {
                let col: Vec<Z> = (0..n).map(|r| normalized[i].at(r, j).clone()).collect();
                if linalg::solve_exact_integer(&normalized[i + 1], &col).is_none() {
                    return Err(ReductionError::BadFlag(format!(
                        "level {} is not contained in level {}",
                        i,
                        i + 1
                    )));
                }
            }
        }
        Ok(Flag {
            e,
            bases: normalized,
        })
    }

    pub fn ambient(&self) -> &EuclideanLattice {
        &self.e
    }

    pub fn rank(&self) -> usize {
        self.e.rank()
    }

    /// Column basis of the rank-`i` member, in Hermite normal form.
    pub fn sub_basis(&self, i: usize) -> &ZMat {
        &self.bases[i]
    }
}

/// Induced quadratic form on the quotient by the saturated column span of
/// `cur`: returns a unimodular matrix whose first `k` columns span that
/// sublattice, together with the quotient Gram in the basis of the images
/// of its remaining columns.
fn quotient_data(e: &EuclideanLattice, cur: &ZMat) -> (ZMat, QMat) {
    let n = e.rank();
    let k = cur.ncols();
    let u = if k == 0 {
        ZMat::identity(n)
    } else {
        let mut u = linalg::complete_basis(cur);
        // Substitute the given columns for the completed ones so lifts are
        // expressed over the caller's basis.
        for j in 0..k {
            for i in 0..n {
                u.set(i, j, cur.at(i, j).clone());
            }
        }
        debug_assert!(u.det().abs().is_one());
        u
    };
    let pulled = e.gram().pullback(&u.to_qmat());
    let qgram = if k == 0 {
        pulled
    } else {
        pulled
            .schur_complement(k)
            .expect("flag member is nondegenerate")
    };
    (u, qgram)
}

/// Sign-normalize so the last nonzero coordinate is positive.
fn normalize_sign(v: &[Z]) -> Vec<Z> {
    let flip = v
        .iter()
        .rev()
        .find(|x| !x.is_zero())
        .map(|x| x.is_negative())
        .unwrap_or(false);
    if flip {
        v.iter().map(|x| -x.clone()).collect()
    } else {
        v.to_vec()
    }
}

/// Reversed-lexicographic key; ties among equal-norm candidates are broken
/// by the smallest key after sign normalization.
fn colex_key(v: &[Z]) -> Vec<Z> {
    v.iter().rev().cloned().collect()
}

fn canonical_vector(cands: impl IntoIterator<Item = Vec<Z>>) -> Vec<Z> {
    cands
        .into_iter()
        .map(|v| normalize_sign(&v))
        .min_by(|a, b| colex_key(a).cmp(&colex_key(b)))
        .expect("nonempty candidate set")
}

/// The reduced flag: each member is generated over the previous one by a
/// lift of a shortest nonzero vector of the successive quotient, with a
/// deterministic tie-break.
pub fn reduced_flag(e: &EuclideanLattice, opts: &EnumOpts) -> Result<Flag, ReductionError> {
    let n = e.rank();
    let mut bases = vec![ZMat::zeros(n, 0)];
    let mut cur = ZMat::zeros(n, 0);
    for k in 0..n {
        let (u, qgram) = quotient_data(e, &cur);
        let sv = enumerate::shortest_vectors(&qgram, opts)?;
        let w = canonical_vector(sv.minimizers);
        let mut coords = vec![Z::zero(); n];
        coords[k..].clone_from_slice(&w);
        let lift = u.mul_vec(&coords);
        let mut next = ZMat::zeros(n, k + 1);
        for j in 0..k {
            for i in 0..n {
                next.set(i, j, cur.at(i, j).clone());
            }
        }
        for (i, x) in lift.iter().enumerate() {
            next.set(i, k, x.clone());
        }
        debug_assert!(
            linalg::is_saturated(&next),
            "a primitive quotient vector lifts to a saturated extension"
        );
        bases.push(next.clone());
        cur = next;
    }
    Flag::new(e.clone(), bases)
}

/// The dual-reduced flag: member `i` is the annihilator, inside `E`, of
/// the rank `n - i` member of the reduced flag of the dual lattice.
pub fn dual_reduced_flag(e: &EuclideanLattice, opts: &EnumOpts) -> Result<Flag, ReductionError> {
    let n = e.rank();
    let df = reduced_flag(&e.dual(), opts)?;
    let mut bases = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i == n {
            bases.push(ZMat::identity(n));
        } else {
            bases.push(df.sub_basis(n - i).transpose().right_kernel());
        }
    }
    Flag::new(e.clone(), bases)
}

// ---------------------------------------------------------------------------
// Line splittings
// ---------------------------------------------------------------------------

/// A decomposition of the underlying group of `E` as a direct sum of `n`
/// lines: the columns of `gens` form a basis of `Z^n`.
#[derive(Debug, Clone)]
pub struct LineSplitting {
    e: EuclideanLattice,
    gens: ZMat,
}

impl LineSplitting {
    pub fn new(e: EuclideanLattice, gens: ZMat) -> Result<LineSplitting, ReductionError> {
        let n = e.rank();
        assert_eq!((gens.nrows(), gens.ncols()), (n, n));
        let det = gens.det();
        if det.is_zero() {
            return Err(ReductionError::DependentGenerators);
        }
        if !det.abs().is_one() {
            return Err(ReductionError::NotBasis);
        }
        Ok(LineSplitting { e, gens })
    }

    pub fn ambient(&self) -> &EuclideanLattice {
        &self.e
    }

    pub fn gens(&self) -> &ZMat {
        &self.gens
    }

    pub fn line_norm_sq(&self, i: usize) -> Q {
        let v: Vec<Z> = (0..self.e.rank()).map(|r| self.gens.at(r, i).clone()).collect();
        self.e.norm_sq(&v)
    }

    /// Degrees `-1/2 log |v_i|^2` of the lines with their induced metrics.
    pub fn line_degrees(&self) -> Vec<ExactLn> {
        (0..self.e.rank())
            .map(|i| ExactLn::half_ln(self.line_norm_sq(i)).neg())
            .collect()
    }
}

/// Splitting adapted to a flag: the `i`-th generator is a minimal-norm
/// lift (deterministic tie-break) of a generator of `L_i / L_{i-1}`.
pub fn split_flag(
    e: &EuclideanLattice,
    flag: &Flag,
    opts: &EnumOpts,
) -> Result<LineSplitting, ReductionError> {
    let n = e.rank();
    assert_eq!(flag.rank(), n);
    let mut gens = ZMat::zeros(n, n);
    for i in 1..=n {
        let li = flag.sub_basis(i);
        let lprev = flag.sub_basis(i - 1);
        let w: Vec<Z> = if i == 1 {
            (0..n).map(|r| li.at(r, 0).clone()).collect()
        } else {
            // Coordinates of the lower member inside the higher one; the
            // last column of a completion generates the quotient line.
            let mut x = ZMat::zeros(i, i - 1);
            for j in 0..i - 1 {
                let col: Vec<Z> = (0..n).map(|r| lprev.at(r, j).clone()).collect();
                let sol = linalg::solve_exact_integer(li, &col)
                    .ok_or_else(|| ReductionError::BadFlag("levels are not nested".into()))?;
                for (r, v) in sol.into_iter().enumerate() {
                    x.set(r, j, v);
                }
            }
            let c = linalg::complete_basis(&x);
            let coords: Vec<Z> = (0..i).map(|r| c.at(r, i - 1).clone()).collect();
            li.mul_vec(&coords)
        };
        let candidates: Vec<Vec<Z>> = if i == 1 {
            vec![w.clone()]
        } else {
            let bq = lprev.to_qmat();
            let gram_prev = e.gram().pullback(&bq);
            let wq: Vec<Q> = w.iter().map(|z| Q::from_integer(z.clone())).collect();
            let gw = e.gram().mul_vec(&wq);
            let rhs: Vec<Q> = (0..i - 1)
                .map(|j| {
                    (0..n)
                        .map(|r| Q::from_integer(lprev.at(r, j).clone()) * gw[r].clone())
                        .sum()
                })
                .collect();
            let t = gram_prev
                .solve_vec(&rhs)
                .expect("flag member Gram is positive-definite");
            let cvp = enumerate::closest_vectors(&gram_prev, &t, opts)?;
            cvp.minimizers
                .into_iter()
                .map(|m| {
                    let shift = lprev.mul_vec(&m);
                    (0..n).map(|r| w[r].clone() - shift[r].clone()).collect()
                })
                .collect()
        };
        let v = canonical_vector(candidates);
        for (r, val) in v.into_iter().enumerate() {
            gens.set(r, i - 1, val);
        }
    }
    LineSplitting::new(e.clone(), gens)
}

// ---------------------------------------------------------------------------
// The slope defect and its bounds
// ---------------------------------------------------------------------------

/// Slope defect of a splitting into lines: the slope of `E` minus the
/// average degree of the lines, `1/(2n) log(prod |v_i|^2 / det E)`.
/// Nonnegative for every basis, zero exactly for orthogonal ones.
pub fn delta_invariant(e: &EuclideanLattice, gens: &ZMat) -> Result<ExactLn, ReductionError> {
    let n = e.rank();
    assert!(n >= 1, "slope defect requires positive rank");
    assert_eq!((gens.nrows(), gens.ncols()), (n, n));
    let det = gens.det();
    if det.is_zero() {
        return Err(ReductionError::DependentGenerators);
    }
    if !det.abs().is_one() {
        return Err(ReductionError::NotBasis);
    }
    let mut prod = Q::one();
    for j in 0..n {
        let v: Vec<Z> = (0..n).map(|r| gens.at(r, j).clone()).collect();
        prod *= e.norm_sq(&v);
    }
    Ok(ExactLn::mul_ln(
        Q::new(Z::one(), Z::from(2 * n as u64)),
        prod / e.gram().det(),
    ))
}

/// The sharper explicit bound `((n-1)/2n) log(1 + (n-1)^2)` on the slope
/// defect of a splitting adapted to a dual-reduced flag.
pub fn c_bound_tight(n: u64) -> ExactLn {
    assert!(n >= 1);
    let m = Z::from(n - 1);
    ExactLn::mul_ln(
        Q::new(m.clone(), Z::from(2 * n)),
        Q::from_integer(Z::one() + &m * &m),
    )
}

/// The simple bound `log n` on the same defect.
pub fn c_bound_simple(n: u64) -> ExactLn {
    assert!(n >= 1);
    ExactLn::ln(Q::from_integer(Z::from(n)))
}

// ---------------------------------------------------------------------------
// Operator norms of the sum map
// ---------------------------------------------------------------------------

/// Monic characteristic polynomial `det(x I - m)` by the Faddeev-LeVerrier
/// recursion, exactly over the rationals.
pub fn charpoly(m: &QMat) -> Poly {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    let trace = |a: &QMat| -> Q { (0..a.nrows()).map(|i| a.at(i, i).clone()).sum() };
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut mk = m.clone();
    for k in 1..=n {
        let ck = -trace(&mk) / Q::from_integer(Z::from(k as u64));
        coeffs[n - k] = ck.clone();
        if k < n {
            let mut shifted = mk.clone();
            for i in 0..n {
                shifted.set(i, i, shifted.at(i, i).clone() + ck.clone());
            }
            mk = m.mul(&shifted);
        }
    }
    Poly::from_coeffs(coeffs)
}

/// Exact spectral data of the sum map `(+) L_i -> E` of a line splitting:
/// its squared operator norm and that of its inverse (largest roots of a
/// rational characteristic polynomial and of its reversal), with exact
/// Sturm certificates for the explicit bounds.
#[derive(Debug, Clone)]
pub struct SigmaNormReport {
    /// Characteristic polynomial of the norm-normalized Gram of the lines.
    pub charpoly: Poly,
    /// Enclosure of the squared operator norm of the sum map.
    pub norm_sq: Enc,
    /// Enclosure of the squared operator norm of its inverse.
    pub inv_norm_sq: Enc,
    /// Certified: the squared norm is at most the rank (any splitting).
    pub norm_le_rank: bool,
    /// Certified: `log |inverse| <= ((n-1)/2) log n + n log n`.
    pub inv_le_simple_bound: bool,
    /// Certified: `log |inverse| <= ((n-1)/2) log n + n c_tight(n)`.
    pub inv_le_tight_bound: bool,
}

/// Spectral report for a splitting; certified only up to
/// [`SIGMA_RANK_CAP`]. The two inverse-norm bounds are theorems for
/// splittings adapted to dual-reduced flags and reported as-is otherwise.
pub fn sigma_norm_report(
    sp: &LineSplitting,
    bits: u32,
) -> Result<SigmaNormReport, ReductionError> {
    let e = sp.ambient();
    let n = e.rank();
    assert!(n >= 1);
    if n > SIGMA_RANK_CAP {
        return Err(ReductionError::RankCapExceeded {
            rank: n,
            cap: SIGMA_RANK_CAP,
        });
    }
    // M = D^{-1} V^T G V with D the diagonal of squared line norms; M is
    // similar to the symmetric normalized Gram, so its eigenvalues are the
    // squared singular values of the sum map.
    let a = e.gram().pullback(&sp.gens().to_qmat());
    let mut m = QMat::zeros(n, n);
    for i in 0..n {
        let d = sp.line_norm_sq(i);
        for j in 0..n {
            m.set(i, j, a.at(i, j).clone() / d.clone());
        }
    }
    let f = charpoly(&m);
    let width = Q::new(Z::one(), Z::one() << bits.min(96));
    let (lo, hi) = poly::largest_real_root_enclosure(&f, &width);
    let norm_sq = Enc::new(lo, hi);
    // Reversal: roots are the reciprocals, so its largest root is the
    // squared norm of the inverse map.
    let f0 = f.eval(&Q::zero());
    debug_assert!(!f0.is_zero());
    let coeffs: Vec<Q> = (0..=n).map(|k| f.coeff(n - k) / f0.clone()).collect();
    let h = Poly::from_coeffs(coeffs);
    let (ilo, ihi) = poly::largest_real_root_enclosure(&h, &width);
    let inv_norm_sq = Enc::new(ilo, ihi);
    let norm_le_rank = poly::all_real_roots_at_most(&f, &Q::from_integer(Z::from(n as u64)));
    // exp(2 ((n-1)/2) log n + 2 n c) with c = log n resp. c_tight(n).
    let nz = Z::from(n as u64);
    let simple_bound = Q::from_integer(nz.pow(3 * n as u32 - 1));
    let m1 = Z::from(n as u64 - 1);
    let tight_bound = Q::from_integer(
        nz.pow(n as u32 - 1) * (Z::one() + &m1 * &m1).pow(n as u32 - 1),
    );
    Ok(SigmaNormReport {
        charpoly: f,
        norm_sq,
        inv_norm_sq,
        norm_le_rank,
        inv_le_simple_bound: poly::all_real_roots_at_most(&h, &simple_bound),
        inv_le_tight_bound: poly::all_real_roots_at_most(&h, &tight_bound),
    })
}

// ---------------------------------------------------------------------------
// Step lemma data and almost-invariance
// ---------------------------------------------------------------------------

/// Quotient of `E` by the first member of its reduced flag (the line
/// through a canonical shortest vector), as a lattice of rank `n - 1`,
/// together with that member's basis vector.
pub fn step_quotient(
    e: &EuclideanLattice,
    opts: &EnumOpts,
) -> Result<(Vec<Z>, EuclideanLattice), ReductionError> {
    let n = e.rank();
    assert!(n >= 1);
    let flag = reduced_flag(e, opts)?;
    let l1 = flag.sub_basis(1);
    let (_, qgram) = quotient_data(e, l1);
    let v: Vec<Z> = (0..n).map(|r| l1.at(r, 0).clone()).collect();
    Ok((v, EuclideanLattice::new(qgram)?))
}

/// Two-sided comparison of a point's distance to `E` with the distance of
/// its image to the extended lattice `E (x) O_L`: the squared bracket is
/// `n^{-3n} d dist^2 <= dist_ext^2 <= d dist^2` for `d` the field degree
/// and `n` the rank.
#[derive(Debug, Clone)]
pub struct AlmostInvariance {
    pub dist_sq: Q,
    pub ext_dist_sq: Q,
    pub degree: usize,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

pub fn almost_invariance_check(
    e: &EuclideanLattice,
    k: &NumberFieldData,
    w: &[Q],
    opts: &EnumOpts,
) -> Result<AlmostInvariance, ReductionError> {
    let n = e.rank();
    assert!(n >= 1);
    assert_eq!(w.len(), n);
    let (ext, delta) = crate::numberfield::extended_lattice(e, k)?;
    let d = k.degree();
    let dist_sq = enumerate::dist2_to_lattice(e.gram(), w, opts)?;
    let target = delta.to_qmat().mul_vec(w);
    let ext_dist_sq = enumerate::dist2_to_lattice(ext.gram(), &target, opts)?;
    let dq = Q::from_integer(Z::from(d as u64));
    let upper_holds = ext_dist_sq <= dq.clone() * dist_sq.clone();
    // exp(-2 s(n)) = n^{-3n} for the distortion s(n) = (3/2) n log n.
    let shrink = Q::new(Z::one(), Z::from(n as u64).pow(3 * n as u32));
    let lower_holds = shrink * dq * dist_sq.clone() <= ext_dist_sq;
    Ok(AlmostInvariance {
        dist_sq,
        ext_dist_sq,
        degree: d,
        lower_holds,
        upper_holds,
    })
}
