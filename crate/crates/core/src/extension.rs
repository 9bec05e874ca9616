//! Extension classes of Euclidean lattices: torus points `T` in
//! `Hom(F, G) tensor R / Hom(F, G)`, admissible extensions presented by a
//! saturated sublattice, sizes as log-distances computed by closest-vector
//! enumeration, Baer sums at both the class and the metric level, duality,
//! the splitting-size identity, direct-summand extraction, the covering
//! radius bound, and sizes after extension of scalars.

use crate::enumerate::{self, BudgetExceeded, EnumOpts};
use crate::enclosure::{ExactLn, LogValue};
use crate::lattice::{hom_lattice, EuclideanLattice, LatticeError};
use crate::linalg::{self, QMat, ZMat};
use crate::numberfield::{extended_lattice, FieldError, NumberFieldData};
use crate::rational::{q, qi, Q, Z};
use crate::voronoi::{self, VoronoiError};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtError {
    #[error("sublattice basis is not saturated (the quotient has torsion)")]
    NotSaturated,
    #[error("operands do not share the required shapes or Gram matrices")]
    ShapeMismatch,
    #[error("search radius does not certify the splitting minimum (boundary hit: {boundary})")]
    RadiusTooSmall { boundary: bool },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Voronoi(#[from] VoronoiError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

impl From<BudgetExceeded> for ExtError {
    fn from(e: BudgetExceeded) -> Self {
        ExtError::Lattice(LatticeError::from(e))
    }
}

/// A class of extensions of `F` by `G`, represented by a rational matrix
/// `T` (rows indexed by `G`, columns by `F`). Two matrices represent the
/// same class iff they differ by an integer matrix; construction reduces
/// `T` to the canonical representative: a closest-vector-reduced matrix,
/// ties broken by the row-major lexicographically smallest result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionClass {
    f: EuclideanLattice,
    g: EuclideanLattice,
    t: QMat,
    /// Squared distance from `T` to the integer matrices in the hom
    /// metric; zero iff the class is split.
    dist_sq: Q,
}

/// Flatten a `rkG x rkF` matrix into hom-lattice coordinates
/// (index `i_F * rkG + j_G`, matching `dual(F) tensor G`).
fn flatten_t(t: &QMat) -> Vec<Q> {
    let (kg, mf) = (t.nrows(), t.ncols());
    let mut out = Vec::with_capacity(kg * mf);
    for i in 0..mf {
        for j in 0..kg {
            out.push(t.at(j, i).clone());
        }
    }
    out
}

fn unflatten_t(v: &[Z], kg: usize, mf: usize) -> QMat {
    let mut t = QMat::zeros(kg, mf);
    for i in 0..mf {
        for j in 0..kg {
            t.set(j, i, Q::from_integer(v[i * kg + j].clone()));
        }
    }
    t
}

fn mat_add(a: &QMat, b: &QMat) -> QMat {
    a.sub(&b.scale(&qi(-1)))
}

/// Row-major lexicographic comparison key.
fn row_major(t: &QMat) -> Vec<Q> {
    let mut out = Vec::with_capacity(t.nrows() * t.ncols());
    for i in 0..t.nrows() {
        for j in 0..t.ncols() {
            out.push(t.at(i, j).clone());
        }
    }
    out
}

impl ExtensionClass {
    /// Build a class from lattices and any rational representative; the
    /// stored representative is canonically reduced.
    pub fn new(
        f: EuclideanLattice,
        g: EuclideanLattice,
        t: QMat,
        opts: &EnumOpts,
    ) -> Result<ExtensionClass, ExtError> {
        if t.nrows() != g.rank() || t.ncols() != f.rank() {
            return Err(ExtError::ShapeMismatch);
        }
        let (kg, mf) = (g.rank(), f.rank());
        if kg == 0 || mf == 0 {
            return Ok(ExtensionClass {
                f,
                g,
                t: QMat::zeros(kg, mf),
                dist_sq: Q::zero(),
            });
        }
        let hom = hom_lattice(&f, &g);
        let target = flatten_t(&t);
        let cvp = enumerate::closest_vectors(hom.gram(), &target, opts)?;
        let reduced = cvp
            .minimizers
            .iter()
            .map(|m| t.sub(&unflatten_t(m, kg, mf)))
            .min_by(|a, b| row_major(a).cmp(&row_major(b)))
            .expect("closest-vector search returns at least one minimizer");
        Ok(ExtensionClass {
            f,
            g,
            t: reduced,
            dist_sq: cvp.min_norm,
        })
    }

    /// The split class of `F` by `G`.
    pub fn zero(f: EuclideanLattice, g: EuclideanLattice) -> ExtensionClass {
        let t = QMat::zeros(g.rank(), f.rank());
        ExtensionClass {
            f,
            g,
            t,
            dist_sq: Q::zero(),
        }
    }

    pub fn f(&self) -> &EuclideanLattice {
        &self.f
    }

    pub fn g(&self) -> &EuclideanLattice {
        &self.g
    }

    /// Canonical reduced representative.
    pub fn t(&self) -> &QMat {
        &self.t
    }

    /// Squared distance of the representative to the integer matrices in
    /// the hom metric (`exp(2 size)`).
    pub fn dist_sq(&self) -> &Q {
        &self.dist_sq
    }

    pub fn is_zero(&self) -> bool {
        self.dist_sq.is_zero()
    }

    /// Exact size `1/2 log dist_sq`; `None` encodes negative infinity
    /// (the split class).
    pub fn size_exact(&self) -> Option<ExactLn> {
        if self.is_zero() {
            None
        } else {
            Some(ExactLn::half_ln(self.dist_sq.clone()))
        }
    }

    /// Size as a reported log value; negative infinity for the split
    /// class.
    pub fn size(&self) -> LogValue {
        match self.size_exact() {
            None => LogValue::neg_infinity(),
            Some(s) => s.to_logvalue(crate::enclosure::precision_bits()),
        }
    }

    /// Baer sum: add representatives, then reduce.
    pub fn baer_sum(&self, other: &ExtensionClass, opts: &EnumOpts) -> Result<ExtensionClass, ExtError> {
        if self.f.gram() != other.f.gram() || self.g.gram() != other.g.gram() {
            return Err(ExtError::ShapeMismatch);
        }
        ExtensionClass::new(
            self.f.clone(),
            self.g.clone(),
            mat_add(&self.t, &other.t),
            opts,
        )
    }

    /// The opposite class.
    pub fn negate(&self, opts: &EnumOpts) -> Result<ExtensionClass, ExtError> {
        ExtensionClass::new(self.f.clone(), self.g.clone(), self.t.scale(&qi(-1)), opts)
    }

    /// Pushout along an integer map `beta: G -> G'` (columns indexed by
    /// the old `G` basis): the class of `T' = beta T` in `Hom(F, G')`.
    pub fn pushout(
        &self,
        beta: &ZMat,
        g_new: EuclideanLattice,
        opts: &EnumOpts,
    ) -> Result<ExtensionClass, ExtError> {
        if beta.ncols() != self.g.rank() || beta.nrows() != g_new.rank() {
            return Err(ExtError::ShapeMismatch);
        }
        let t = beta.to_qmat().mul(&self.t);
        ExtensionClass::new(self.f.clone(), g_new, t, opts)
    }

    /// Pullback along an integer map `alpha: F' -> F`: the class of
    /// `T' = T alpha` in `Hom(F', G)`.
    pub fn pullback(
        &self,
        alpha: &ZMat,
        f_new: EuclideanLattice,
        opts: &EnumOpts,
    ) -> Result<ExtensionClass, ExtError> {
        if alpha.nrows() != self.f.rank() || alpha.ncols() != f_new.rank() {
            return Err(ExtError::ShapeMismatch);
        }
        let t = self.t.mul(&alpha.to_qmat());
        ExtensionClass::new(f_new, self.g.clone(), t, opts)
    }
}

/// An extension presented concretely: an ambient lattice `E` together with
/// a saturated sublattice `G` (basis vectors as matrix columns). The
/// quotient `F = E/G` carries the quotient metric.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmissibleExtension {
    e: EuclideanLattice,
    g_basis: ZMat,
}

impl AdmissibleExtension {
    pub fn new(e: EuclideanLattice, g_basis: ZMat) -> Result<AdmissibleExtension, ExtError> {
        assert_eq!(
            g_basis.nrows(),
            e.rank(),
            "basis vectors must live in the ambient lattice"
        );
        if !linalg::is_saturated(&g_basis) {
            return Err(ExtError::NotSaturated);
        }
        Ok(AdmissibleExtension { e, g_basis })
    }

    pub fn e(&self) -> &EuclideanLattice {
        &self.e
    }

    pub fn g_basis(&self) -> &ZMat {
        &self.g_basis
    }

    pub fn g_rank(&self) -> usize {
        self.g_basis.ncols()
    }

    pub fn f_rank(&self) -> usize {
        self.e.rank() - self.g_basis.ncols()
    }
}

/// Adapted-basis data of an admissible extension: a unimodular ambient
/// basis whose first `k` vectors are the given `G` basis, the blocks of
/// the Gram matrix in that basis, the exact quotient Gram (Schur
/// complement), and the raw torus representative `-A^{-1} B` (the `G`
/// coordinates of the orthogonal splitting relative to the integer
/// section given by the completed basis vectors).
struct Adapted {
    u: ZMat,
    g_gram: QMat,
    f_gram: QMat,
    t_raw: QMat,
}

fn adapt(adm: &AdmissibleExtension) -> Adapted {
    let n = adm.e.rank();
    let k = adm.g_rank();
    let comp = linalg::complete_basis(&adm.g_basis);
    let mut u = ZMat::zeros(n, n);
    for j in 0..k {
        for i in 0..n {
            u.set(i, j, adm.g_basis.at(i, j).clone());
        }
    }
    for j in k..n {
        for i in 0..n {
            u.set(i, j, comp.at(i, j).clone());
        }
    }
    debug_assert!(u.det().abs().is_one());
    let gram_ad = adm.e.gram().pullback(&u.to_qmat());
    let mut a = QMat::zeros(k, k);
    let mut b = QMat::zeros(k, n - k);
    for i in 0..k {
        for j in 0..k {
            a.set(i, j, gram_ad.at(i, j).clone());
        }
        for j in k..n {
            b.set(i, j - k, gram_ad.at(i, j).clone());
        }
    }
    let f_gram = gram_ad
        .schur_complement(k)
        .expect("positive-definite blocks are invertible");
    let t_raw = if k == 0 || n == k {
        QMat::zeros(k, n - k)
    } else {
        a.solve(&b)
            .expect("positive-definite blocks are invertible")
            .scale(&qi(-1))
    };
    Adapted {
        u,
        g_gram: a,
        f_gram,
        t_raw,
    }
}

/// The extension class of an admissible extension: quotient and sub
/// metrics computed exactly, representative reduced canonically.
pub fn class_of(adm: &AdmissibleExtension, opts: &EnumOpts) -> Result<ExtensionClass, ExtError> {
    let ad = adapt(adm);
    let f = EuclideanLattice::new(ad.f_gram)?;
    let g = EuclideanLattice::new(ad.g_gram)?;
    ExtensionClass::new(f, g, ad.t_raw, opts)
}

/// The rank-`n` standard example: `E = Z^(n+1)`, `G` the kernel of the
/// coordinate sum (the root lattice of determinant `n + 1`), quotient of
/// rank one with `|1|^2 = 1/(n+1)`. Its class has size `1/2 log n`.
pub fn an_example(n: usize) -> AdmissibleExtension {
    assert!(n >= 1);
    let e = EuclideanLattice::standard(n + 1);
    let mut g = ZMat::zeros(n + 1, n);
    for j in 0..n {
        g.set(j, j, Z::one());
        g.set(j + 1, j, -Z::one());
    }
    AdmissibleExtension::new(e, g).expect("difference basis is saturated")
}

/// Metric-level Baer sum: the quadratic form
/// `|(e1, e2)|^2 = 2|e1|^2 + 2|e2|^2 - 3|p1 e1|^2` restricted to the
/// kernel of `p1 - p2`, then the quotient metric modulo the antidiagonal
/// copy of `G`. The class of the result is the Baer sum of the classes.
pub fn admissible_baer_sum(
    a1: &AdmissibleExtension,
    a2: &AdmissibleExtension,
    _opts: &EnumOpts,
) -> Result<AdmissibleExtension, ExtError> {
    let ad1 = adapt(a1);
    let ad2 = adapt(a2);
    if ad1.g_gram != ad2.g_gram || ad1.f_gram != ad2.f_gram {
        return Err(ExtError::ShapeMismatch);
    }
    let k = a1.g_rank();
    let m = a1.f_rank();
    let np = k + m;
    // Ambient form on (E1 + E2) in adapted coordinates.
    let gram1 = a1.e.gram().pullback(&ad1.u.to_qmat());
    let gram2 = a2.e.gram().pullback(&ad2.u.to_qmat());
    let mut amb = gram1.scale(&qi(2)).direct_sum(&gram2.scale(&qi(2)));
    for i in 0..m {
        for j in 0..m {
            let v = amb.at(k + i, k + j).clone() - qi(3) * ad1.f_gram.at(i, j).clone();
            amb.set(k + i, k + j, v);
        }
    }
    // Kernel of p1 - p2: both G copies plus the diagonal F lifts.
    let mut kbasis = QMat::zeros(2 * np, 2 * k + m);
    for i in 0..k {
        kbasis.set(i, i, Q::one());
        kbasis.set(np + i, k + i, Q::one());
    }
    for j in 0..m {
        kbasis.set(k + j, 2 * k + j, Q::one());
        kbasis.set(np + k + j, 2 * k + j, Q::one());
    }
    let gram_k = amb.pullback(&kbasis);
    // Change basis so the antidiagonal copy of G comes first, then quotient.
    let mut change = QMat::zeros(2 * k + m, 2 * k + m);
    for i in 0..k {
        change.set(i, i, Q::one());
        change.set(k + i, i, -Q::one());
        change.set(i, k + i, Q::one());
    }
    for j in 0..m {
        change.set(2 * k + j, 2 * k + j, Q::one());
    }
    let gram_sum = gram_k
        .pullback(&change)
        .schur_complement(k)
        .expect("positive-definite blocks are invertible");
    let e_sum = EuclideanLattice::new(gram_sum)?;
    let mut g_basis = ZMat::zeros(np, k);
    for i in 0..k {
        g_basis.set(i, i, Z::one());
    }
    AdmissibleExtension::new(e_sum, g_basis)
}

/// The dual extension `0 -> dual(F) -> dual(E) -> dual(G) -> 0`: the dual
/// lattice together with the annihilator of `G` (an automatically
/// saturated kernel). Sizes are preserved.
pub fn dual_extension(adm: &AdmissibleExtension) -> AdmissibleExtension {
    let ann = adm.g_basis.transpose().right_kernel();
    AdmissibleExtension::new(adm.e.dual(), ann)
        .expect("integer kernels are saturated")
}

/// Exact minimum over integer splittings of the summed squared splitting
/// norms: `rk E + dist_sq(T)`, which equals `rk E + exp(2 size)`. With an
/// explicit `radius_sq` the search is a complete fixed-radius enumeration
/// and refuses to certify when nothing lies strictly inside the radius.
pub fn splitting_size_min(
    adm: &AdmissibleExtension,
    radius_sq: Option<&Q>,
    opts: &EnumOpts,
) -> Result<Q, ExtError> {
    let ad = adapt(adm);
    let rk = qi(adm.e.rank() as i64);
    let k = adm.g_rank();
    let m = adm.f_rank();
    if k == 0 || m == 0 {
        return Ok(rk);
    }
    let f = EuclideanLattice::new(ad.f_gram)?;
    let g = EuclideanLattice::new(ad.g_gram)?;
    let hom = hom_lattice(&f, &g);
    let target = flatten_t(&ad.t_raw);
    let dist = match radius_sq {
        None => enumerate::closest_vectors(hom.gram(), &target, opts)?.min_norm,
        Some(r) => {
            let found = enumerate::vectors_within(hom.gram(), &target, r, opts)?;
            let Some((_, best)) = found.points.first() else {
                return Err(ExtError::RadiusTooSmall { boundary: false });
            };
            if best == r {
                return Err(ExtError::RadiusTooSmall { boundary: true });
            }
            best.clone()
        }
    };
    Ok(rk + dist)
}

/// A direct summand `F' <= E` mapping isomorphically onto `F`: the image
/// of the integer splitting closest to the orthogonal one. Returns its
/// basis (columns, ambient coordinates) and the degree loss
/// `deg F - deg F' >= 0`, which obeys
/// `deg F' >= deg F - (m/2) log(1 + exp(2 size / m))` for
/// `m = min(rk F, rk G)`.
pub fn direct_summand_split(
    adm: &AdmissibleExtension,
    opts: &EnumOpts,
) -> Result<(ZMat, LogValue), ExtError> {
    let ad = adapt(adm);
    let k = adm.g_rank();
    let m = adm.f_rank();
    assert!(k >= 1 && m >= 1, "both ranks must be positive");
    let f = EuclideanLattice::new(ad.f_gram.clone())?;
    let g = EuclideanLattice::new(ad.g_gram)?;
    let hom = hom_lattice(&f, &g);
    let target = flatten_t(&ad.t_raw);
    let cvp = enumerate::closest_vectors(hom.gram(), &target, opts)?;
    let mstar = cvp
        .minimizers
        .iter()
        .min_by(|x, y| {
            row_major(&ad.t_raw.sub(&unflatten_t(x, k, m))).cmp(&row_major(
                &ad.t_raw.sub(&unflatten_t(y, k, m)),
            ))
        })
        .expect("closest-vector search returns at least one minimizer");
    // Section f_j -> lift_j + sum_i M[i][j] g_i, expressed in ambient
    // coordinates through the adapted basis.
    let mut stack = ZMat::zeros(k + m, m);
    for j in 0..m {
        for i in 0..k {
            stack.set(i, j, mstar[j * k + i].clone());
        }
        stack.set(k + j, j, Z::one());
    }
    let basis = ad.u.mul(&stack);
    let fprime_gram = adm.e.gram().pullback(&basis.to_qmat());
    let loss = ExactLn::mul_ln(q(1, 2), fprime_gram.det() / ad.f_gram.det());
    Ok((basis, loss.to_logvalue(crate::enclosure::precision_bits())))
}

/// The largest possible size of an extension of `F` by `G`: the log
/// covering radius of the hom lattice.
pub fn max_size(
    f: &EuclideanLattice,
    g: &EuclideanLattice,
    opts: &EnumOpts,
) -> Result<LogValue, ExtError> {
    Ok(LogValue::from_enc(
        &ExactLn::half_ln(max_size_sq(f, g, opts)?)
            .to_enc(crate::enclosure::precision_bits()),
    ))
}

/// Squared covering radius of the hom lattice (`exp(2 max_size)`).
pub fn max_size_sq(
    f: &EuclideanLattice,
    g: &EuclideanLattice,
    opts: &EnumOpts,
) -> Result<Q, ExtError> {
    assert!(f.rank() >= 1 && g.rank() >= 1, "ranks must be positive");
    let hom = hom_lattice(f, g);
    Ok(voronoi::voronoi_data(&hom, opts)?.covering_radius_sq)
}

/// Squared distance data after extension of scalars: the image of the
/// representative under the diagonal embedding, measured against the
/// extended hom lattice. The normalized squared size is this value divided
/// by the field degree, and it never exceeds `dist_sq` of the class.
pub fn base_changed_dist_sq(
    c: &ExtensionClass,
    l: &NumberFieldData,
    opts: &EnumOpts,
) -> Result<Q, ExtError> {
    if c.f.rank() == 0 || c.g.rank() == 0 {
        return Ok(Q::zero());
    }
    let hom = hom_lattice(&c.f, &c.g);
    let (ext, _) = extended_lattice(&hom, l)?;
    let d = l.degree();
    let flat = flatten_t(&c.t);
    let mut target = vec![Q::zero(); flat.len() * d];
    for (i, v) in flat.into_iter().enumerate() {
        target[i * d] = v;
    }
    Ok(enumerate::dist2_to_lattice(ext.gram(), &target, opts)?)
}

/// Size of the class after extension of scalars (normalized by the field
/// degree); negative infinity when the extended class splits.
pub fn base_changed_size(
    c: &ExtensionClass,
    l: &NumberFieldData,
    opts: &EnumOpts,
) -> Result<LogValue, ExtError> {
    let dist = base_changed_dist_sq(c, l, opts)?;
    if dist.is_zero() {
        return Ok(LogValue::neg_infinity());
    }
    let normalized = dist / qi(l.degree() as i64);
    Ok(ExactLn::half_ln(normalized).to_logvalue(crate::enclosure::precision_bits()))
}

/// Squared Hilbert-Schmidt norm of an integer map `beta: G -> G'` between
/// lattices: `tr(beta^T gram(G') beta gram(G)^{-1})`. Dominates the
/// squared operator norm, so `size(pushout) <= size + 1/2 log` of this.
pub fn hs_norm_sq(beta: &ZMat, from: &EuclideanLattice, to: &EuclideanLattice) -> Q {
    let b = beta.to_qmat();
    let m = to
        .gram()
        .pullback(&b)
        .mul(&from.gram().inverse().expect("positive-definite"));
    (0..m.nrows()).map(|i| m.at(i, i).clone()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{qi, zi};

    fn opts() -> EnumOpts {
        EnumOpts::default()
    }

    fn a2_adm() -> AdmissibleExtension {
        an_example(2)
    }

    #[test]
    fn rank_one_quotient_example() {
        let adm = an_example(1);
        let c = class_of(&adm, &opts()).unwrap();
        assert_eq!(c.f().gram(), &QMat::from_rows(vec![vec![q(1, 2)]]));
        assert_eq!(c.g().gram(), &QMat::from_rows(vec![vec![qi(2)]]));
        // Representative is +-1/2; canonical pick is the lex-smaller -1/2.
        assert_eq!(c.t(), &QMat::from_rows(vec![vec![q(-1, 2)]]));
        assert_eq!(c.dist_sq(), &qi(1));
        assert_eq!(c.size().value, 0.0);
    }

    #[test]
    fn standard_example_sizes() {
        for n in [1usize, 2, 5, 8] {
            let adm = an_example(n);
            let c = class_of(&adm, &opts()).unwrap();
            assert_eq!(c.f().gram(), &QMat::from_rows(vec![vec![q(1, n as i64 + 1)]]));
            assert_eq!(c.dist_sq(), &qi(n as i64), "n={}", n);
            let want = (n as f64).ln() / 2.0;
            assert!((c.size().value - want).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_classes() {
        // G = E: rank-0 quotient.
        let e = EuclideanLattice::new(QMat::from_int_rows(&[&[2, -1], &[-1, 2]])).unwrap();
        let full = AdmissibleExtension::new(e.clone(), ZMat::identity(2)).unwrap();
        let c = class_of(&full, &opts()).unwrap();
        assert!(c.is_zero());
        assert!(c.size().is_neg_infinity());
        assert!(c.size_exact().is_none());
        // Block-diagonal: split.
        let split = EuclideanLattice::new(QMat::from_int_rows(&[&[2, 0], &[0, 3]])).unwrap();
        let mut g = ZMat::zeros(2, 1);
        g.set(0, 0, zi(1));
        let adm = AdmissibleExtension::new(split, g).unwrap();
        assert!(class_of(&adm, &opts()).unwrap().is_zero());
        // Non-saturated basis is refused.
        let mut g2 = ZMat::zeros(2, 1);
        g2.set(0, 0, zi(2));
        assert_eq!(
            AdmissibleExtension::new(EuclideanLattice::standard(2), g2).unwrap_err(),
            ExtError::NotSaturated
        );
    }

    #[test]
    fn baer_sum_is_a_homomorphism() {
        let f = EuclideanLattice::standard(1);
        let g = EuclideanLattice::new(QMat::from_int_rows(&[&[2, -1], &[-1, 2]])).unwrap();
        let mk = |a: Q, b: Q| {
            ExtensionClass::new(f.clone(), g.clone(), QMat::from_rows(vec![vec![a], vec![b]]), &opts())
                .unwrap()
        };
        let c1 = mk(q(1, 3), q(1, 5));
        let c2 = mk(q(2, 7), q(-3, 4));
        let direct = mk(q(1, 3) + q(2, 7), q(1, 5) + q(-3, 4));
        assert_eq!(c1.baer_sum(&c2, &opts()).unwrap(), direct);
        // c + (-c) = 0.
        let z = c1.baer_sum(&c1.negate(&opts()).unwrap(), &opts()).unwrap();
        assert!(z.is_zero());
        assert_eq!(z, ExtensionClass::zero(f.clone(), g.clone()));
        // Representative invariance: shifting by integers does not change
        // the class.
        let shifted = mk(q(1, 3) + qi(4), q(1, 5) - qi(7));
        assert_eq!(shifted, mk(q(1, 3), q(1, 5)));
        // Mismatched shapes are refused.
        let other = ExtensionClass::zero(f.clone(), EuclideanLattice::standard(2));
        assert_eq!(
            c1.baer_sum(&other, &opts()).unwrap_err(),
            ExtError::ShapeMismatch
        );
    }

    #[test]
    fn metric_baer_sum_matches_class_sum() {
        let a = a2_adm();
        let sum = admissible_baer_sum(&a, &a, &opts()).unwrap();
        assert_eq!(sum.e().rank(), 3);
        let c = class_of(&a, &opts()).unwrap();
        let expect = c.baer_sum(&c, &opts()).unwrap();
        let got = class_of(&sum, &opts()).unwrap();
        assert_eq!(got, expect);
        // Split + split = split.
        let split = EuclideanLattice::new(QMat::from_int_rows(&[&[3, 0], &[0, 5]])).unwrap();
        let mut g = ZMat::zeros(2, 1);
        g.set(0, 0, zi(1));
        let s = AdmissibleExtension::new(split, g).unwrap();
        let ss = admissible_baer_sum(&s, &s, &opts()).unwrap();
        assert!(class_of(&ss, &opts()).unwrap().is_zero());
    }

    #[test]
    fn glued_splitting_has_quotient_norm() {
        // The image of (orthogonal lift, orthogonal lift) in the metric
        // Baer sum has the norm of the underlying quotient vector.
        let a = a2_adm();
        let sum = admissible_baer_sum(&a, &a, &opts()).unwrap();
        let csum = class_of(&sum, &opts()).unwrap();
        let ad_f = csum.f().gram().clone();
        // Coordinates of the glued orthogonal lift of f: (T_sum f, f).
        let e_sum_adapted = adapt(&sum);
        for y in [vec![qi(1)], vec![qi(-3)]] {
            let t_y: Vec<Q> = (0..sum.g_rank())
                .map(|i| e_sum_adapted.t_raw.at(i, 0).clone() * y[0].clone())
                .collect();
            let mut point: Vec<Q> = t_y.clone();
            point.extend(y.clone());
            // Express in ambient coordinates of E_sum: adapted basis is
            // [g | completion].
            let u = e_sum_adapted.u.to_qmat();
            let amb: Vec<Q> = (0..sum.e().rank())
                .map(|i| {
                    (0..sum.e().rank())
                        .map(|j| u.at(i, j).clone() * point[j].clone())
                        .sum()
                })
                .collect();
            let norm = sum.e().norm_sq_point(&amb);
            let want = ad_f.at(0, 0).clone() * y[0].clone() * y[0].clone();
            assert_eq!(norm, want);
        }
    }

    #[test]
    fn duality_preserves_size() {
        let a = a2_adm();
        let d = dual_extension(&a);
        let cd = class_of(&d, &opts()).unwrap();
        let c = class_of(&a, &opts()).unwrap();
        assert_eq!(cd.dist_sq(), c.dist_sq());
        // Sub of the dual is the dual of the quotient: determinants invert.
        assert_eq!(cd.g().det(), qi(1) / c.f().det());
        assert_eq!(cd.f().det(), qi(1) / c.g().det());
        // Double dual keeps the size.
        let dd = dual_extension(&d);
        assert_eq!(
            class_of(&dd, &opts()).unwrap().dist_sq(),
            c.dist_sq()
        );
        // Split stays split.
        let split = EuclideanLattice::new(QMat::from_int_rows(&[&[3, 0], &[0, 5]])).unwrap();
        let mut g = ZMat::zeros(2, 1);
        g.set(0, 0, zi(1));
        let s = AdmissibleExtension::new(split, g).unwrap();
        assert!(class_of(&dual_extension(&s), &opts()).unwrap().is_zero());
    }

    #[test]
    fn splitting_minimum() {
        // Split extension: rk E.
        let split = EuclideanLattice::new(QMat::from_int_rows(&[&[3, 0], &[0, 5]])).unwrap();
        let mut g = ZMat::zeros(2, 1);
        g.set(0, 0, zi(1));
        let s = AdmissibleExtension::new(split, g).unwrap();
        assert_eq!(splitting_size_min(&s, None, &opts()).unwrap(), qi(2));
        // Rank-1 example: 2 + 1; rank-2 example: 3 + 2.
        assert_eq!(splitting_size_min(&an_example(1), None, &opts()).unwrap(), qi(3));
        let a = a2_adm();
        assert_eq!(splitting_size_min(&a, None, &opts()).unwrap(), qi(5));
        // Brute force over integer splittings with small entries agrees.
        let ad = adapt(&a);
        let f = EuclideanLattice::new(ad.f_gram.clone()).unwrap();
        let gl = EuclideanLattice::new(ad.g_gram.clone()).unwrap();
        let hom = hom_lattice(&f, &gl);
        let mut best: Option<Q> = None;
        for m0 in -3i64..=3 {
            for m1 in -3i64..=3 {
                let diff = vec![
                    ad.t_raw.at(0, 0).clone() - qi(m0),
                    ad.t_raw.at(1, 0).clone() - qi(m1),
                ];
                let v = crate::linalg::gram_quad(hom.gram(), &diff);
                if best.as_ref().map_or(true, |b| &v < b) {
                    best = Some(v);
                }
            }
        }
        assert_eq!(qi(3) + best.unwrap(), qi(5));
        // Radius handling: too small, boundary, and comfortable.
        assert_eq!(
            splitting_size_min(&a, Some(&qi(1)), &opts()).unwrap_err(),
            ExtError::RadiusTooSmall { boundary: false }
        );
        assert_eq!(
            splitting_size_min(&a, Some(&qi(2)), &opts()).unwrap_err(),
            ExtError::RadiusTooSmall { boundary: true }
        );
        assert_eq!(splitting_size_min(&a, Some(&qi(3)), &opts()).unwrap(), qi(5));
    }

    #[test]
    fn direct_summand_bound() {
        let a = a2_adm();
        let (basis, loss) = direct_summand_split(&a, &opts()).unwrap();
        let fprime = a.e().gram().pullback(&basis.to_qmat());
        // The optimal splitting image has a unit vector as basis.
        assert_eq!(fprime, QMat::identity(1));
        // Tightness here: det F' = det F * (1 + dist^2) exactly.
        let c = class_of(&a, &opts()).unwrap();
        assert_eq!(
            fprime.det(),
            c.f().det() * (qi(1) + c.dist_sq().clone())
        );
        assert!((loss.value - (3.0f64).ln() / 2.0).abs() < 1e-12);
        // Split case: no loss.
        let split = EuclideanLattice::new(QMat::from_int_rows(&[&[3, 0], &[0, 5]])).unwrap();
        let mut g = ZMat::zeros(2, 1);
        g.set(0, 0, zi(1));
        let s = AdmissibleExtension::new(split, g).unwrap();
        let (sb, sloss) = direct_summand_split(&s, &opts()).unwrap();
        assert_eq!(sloss.value, 0.0);
        assert_eq!(sb.at(1, 0), &zi(1));
        // General bound with an exact m-th root majorant, on the standard
        // examples: det F' <= det F * (1 + u)^m with u >= dist^(2/m).
        for n in [1usize, 2, 3, 4] {
            let adm = an_example(n);
            let (b, _) = direct_summand_split(&adm, &opts()).unwrap();
            let fp = adm.e().gram().pullback(&b.to_qmat());
            let cl = class_of(&adm, &opts()).unwrap();
            let m = cl.f().rank().min(cl.g().rank()) as u32;
            let u = crate::rational::rational_root_upper(cl.dist_sq(), m);
            let mut rhs = cl.f().det();
            for _ in 0..m {
                rhs *= qi(1) + u.clone();
            }
            assert!(fp.det() <= rhs, "n={}", n);
        }
    }

    #[test]
    fn covering_radius_bound() {
        let z = EuclideanLattice::standard(1);
        let z2 = EuclideanLattice::standard(2);
        assert_eq!(max_size_sq(&z, &z, &opts()).unwrap(), q(1, 4));
        assert!((max_size(&z, &z, &opts()).unwrap().value - 0.25f64.ln() / 2.0).abs() < 1e-12);
        assert_eq!(max_size_sq(&z, &z2, &opts()).unwrap(), q(1, 2));
        // A deep-hole representative attains the maximum.
        let deep = ExtensionClass::new(
            z.clone(),
            z2.clone(),
            QMat::from_rows(vec![vec![q(1, 2)], vec![q(1, 2)]]),
            &opts(),
        )
        .unwrap();
        assert_eq!(deep.dist_sq(), &q(1, 2));
        // Every class is bounded by the covering radius.
        let c = ExtensionClass::new(
            z.clone(),
            z2.clone(),
            QMat::from_rows(vec![vec![q(1, 3)], vec![q(2, 7)]]),
            &opts(),
        )
        .unwrap();
        assert!(c.dist_sq() <= &q(1, 2));
    }

    #[test]
    fn base_change_sizes() {
        let c = class_of(&a2_adm(), &opts()).unwrap();
        // L = Q: nothing changes.
        let lq = NumberFieldData::rational();
        assert_eq!(base_changed_dist_sq(&c, &lq, &opts()).unwrap(), *c.dist_sq());
        // Invariance for this class over the third cyclotomic field:
        // normalized distance agrees exactly.
        let l3 = NumberFieldData::cyclotomic(3);
        let d3 = base_changed_dist_sq(&c, &l3, &opts()).unwrap();
        assert_eq!(d3, qi(l3.degree() as i64) * c.dist_sq().clone());
        // Monotonicity: normalized extended distance never exceeds dist_sq.
        let f = EuclideanLattice::standard(1);
        let g = EuclideanLattice::new(QMat::from_int_rows(&[&[2, -1], &[-1, 2]])).unwrap();
        let l4 = NumberFieldData::cyclotomic(4);
        for (a, b) in [(q(1, 3), q(1, 5)), (q(1, 2), q(1, 2)), (q(2, 5), q(-1, 7))] {
            let cl = ExtensionClass::new(
                f.clone(),
                g.clone(),
                QMat::from_rows(vec![vec![a], vec![b]]),
                &opts(),
            )
            .unwrap();
            for l in [&l3, &l4] {
                let ext = base_changed_dist_sq(&cl, l, &opts()).unwrap();
                assert!(ext <= qi(l.degree() as i64) * cl.dist_sq().clone());
            }
        }
        // Zero class stays split.
        let z = ExtensionClass::zero(f.clone(), g.clone());
        assert!(base_changed_size(&z, &l3, &opts()).unwrap().is_neg_infinity());
    }

    #[test]
    fn pushout_pullback_bounds() {
        let f = EuclideanLattice::standard(1);
        let g = EuclideanLattice::new(QMat::from_int_rows(&[&[2, -1], &[-1, 2]])).unwrap();
        let c = ExtensionClass::new(
            f.clone(),
            g.clone(),
            QMat::from_rows(vec![vec![q(1, 3)], vec![q(2, 5)]]),
            &opts(),
        )
        .unwrap();
        // Pushout along an integer matrix to the standard plane.
        let g2 = EuclideanLattice::standard(2);
        let beta = ZMat::from_int_rows(&[&[1, 2], &[0, 1]]);
        let pc = c.pushout(&beta, g2.clone(), &opts()).unwrap();
        let hs = hs_norm_sq(&beta, &g, &g2);
        assert!(pc.dist_sq() <= &(hs.clone() * c.dist_sq().clone()));
        // Pullback along multiplication by 2 on F.
        let alpha = ZMat::from_int_rows(&[&[2]]);
        let f2 = EuclideanLattice::rank1(qi(1)).unwrap();
        let qc = c.pullback(&alpha, f2.clone(), &opts()).unwrap();
        let hs_a = hs_norm_sq(&alpha, &f2, &f);
        assert!(qc.dist_sq() <= &(hs_a * c.dist_sq().clone()));
        // Pushout by the identity is the identity.
        let idc = c.pushout(&ZMat::identity(2), g.clone(), &opts()).unwrap();
        assert_eq!(idc, c);
    }
}
