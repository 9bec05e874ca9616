//! Number fields as exact embedding data: trace pairings, discriminants,
//! direct-image (Minkowski) lattices, scalar extension, and the duality and
//! decomposition identities used by the base-change machinery.
//!
//! The hermitian pairing is `T2(x, y) = sum over embeddings s of
//! s(x) * conj(s(y))`. Two kinds of fields carry it exactly:
//! cyclotomic fields, where `T2(z^i, z^j)` is the Ramanujan sum `c_n(i-j)`,
//! and totally real fields, where `T2` is the trace form (conjugation is
//! trivial). Fields outside these kinds can be constructed as carriers but
//! every metric operation refuses them, because downstream decisions demand
//! exact arithmetic.

use crate::enumerate::{self, EnumOpts};
use crate::lattice::EuclideanLattice;
use crate::linalg::{gram_quad, QMat, ZMat};
use crate::poly::{
    count_real_roots, cyclotomic_poly, poly_gcd, poly_inverse_mod, power_sums, x_power_mod, Poly,
};
use crate::rational::{isqrt_floor, Q, Z};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("operation requires an exact field kind (cyclotomic or totally real)")]
    InexactField,
    #[error("minimal polynomial must be monic with integer coefficients and positive degree")]
    BadPolynomial,
    #[error("polynomial is not separable (repeated roots)")]
    NotSquarefree,
    #[error("polynomial is not totally real: {real} of {degree} roots are real")]
    NotTotallyReal { real: usize, degree: usize },
    #[error(transparent)]
    Lattice(#[from] crate::lattice::LatticeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldKind {
    Cyclotomic(u64),
    TotallyReal,
    General,
}

/// A number field with a distinguished integral basis (assumed to span the
/// maximal order) and, for exact kinds, its exact hermitian data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NumberFieldData {
    minpoly: Poly,
    degree: usize,
    kind: FieldKind,
    /// Exact pairing matrix `T2(b_i, b_j)` (exact kinds only).
    t2: Option<QMat>,
    /// Exact traces of the basis elements (exact kinds only).
    trace: Option<Vec<Q>>,
    /// Field discriminant with sign (exact kinds only).
    disc: Option<Z>,
}

/// Ramanujan sum `c_n(k)`: the sum of `e^(2 pi i d k / n)` over units `d`
/// mod `n`, computed exactly as `moebius(m) * phi(n) / phi(m)` with
/// `m = n / gcd(n, k)`.
pub fn ramanujan(n: u64, k: i64) -> Z {
    assert!(n >= 1);
    let kr = (k.rem_euclid(n as i64)) as u64;
    let g = if kr == 0 { n } else { n.gcd(&kr) };
    let m = n / g;
    let phi_n = crate::arith::euler_phi(n);
    let phi_m = crate::arith::euler_phi(m);
    Z::from(crate::arith::moebius(m)) * Z::from(phi_n / phi_m)
}

fn validate_monic_integral(f: &Poly) -> Result<usize, FieldError> {
    let d = f.degree().ok_or(FieldError::BadPolynomial)?;
    if d == 0 || !f.is_monic() || !f.is_integral() {
        return Err(FieldError::BadPolynomial);
    }
    Ok(d)
}

impl NumberFieldData {
    /// The `n`-th cyclotomic field with basis `1, z, ..., z^(phi(n)-1)`;
    /// pairing entries are Ramanujan sums, so everything is exact.
    pub fn cyclotomic(n: u64) -> NumberFieldData {
        assert!(n >= 1);
        let minpoly = cyclotomic_poly(n);
        let d = minpoly.degree().unwrap();
        let t2 = QMat::from_rows(
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| Q::from_integer(ramanujan(n, i as i64 - j as i64)))
                        .collect()
                })
                .collect(),
        );
        let trace: Vec<Q> = (0..d)
            .map(|i| Q::from_integer(ramanujan(n, i as i64)))
            .collect();
        // |disc| = det of the pairing matrix; the sign is (-1)^(pairs of
        // complex embeddings), i.e. negative iff phi(n)/2 is odd (n >= 3).
        let abs_disc = t2.det();
        debug_assert!(abs_disc.is_integer());
        let mut disc = abs_disc.to_integer();
        if n >= 3 && (d / 2) % 2 == 1 {
            disc = -disc;
        }
        NumberFieldData {
            minpoly,
            degree: d,
            kind: FieldKind::Cyclotomic(n),
            t2: Some(t2),
            trace: Some(trace),
            disc: Some(disc),
        }
    }

    /// The rational field.
    pub fn rational() -> NumberFieldData {
        NumberFieldData::cyclotomic(1)
    }

    /// A totally real field presented by a monic irreducible integer
    /// polynomial with all roots real, power integral basis assumed
    /// maximal. The pairing is the trace form `Tr(x y)`, exact via Newton
    /// power sums.
    pub fn totally_real(minpoly: Poly) -> Result<NumberFieldData, FieldError> {
        let d = validate_monic_integral(&minpoly)?;
        if poly_gcd(&minpoly, &minpoly.derivative())
            .degree()
            .is_some_and(|g| g > 0)
        {
            return Err(FieldError::NotSquarefree);
        }
        let real = count_real_roots(&minpoly);
        if real != d {
            return Err(FieldError::NotTotallyReal { real, degree: d });
        }
        let ps = power_sums(&minpoly, 2 * d - 2);
        let t2 = QMat::from_rows(
            (0..d)
                .map(|i| (0..d).map(|j| ps[i + j].clone()).collect())
                .collect(),
        );
        let trace: Vec<Q> = (0..d).map(|i| ps[i].clone()).collect();
        let det = t2.det();
        debug_assert!(det.is_integer());
        let disc = det.to_integer();
        Ok(NumberFieldData {
            minpoly,
            degree: d,
            kind: FieldKind::TotallyReal,
            t2: Some(t2),
            trace: Some(trace),
            disc: Some(disc),
        })
    }

    /// A field carrier without exact hermitian data; every metric operation
    /// refuses it.
    pub fn general(minpoly: Poly) -> Result<NumberFieldData, FieldError> {
        let d = validate_monic_integral(&minpoly)?;
        Ok(NumberFieldData {
            minpoly,
            degree: d,
            kind: FieldKind::General,
            t2: None,
            trace: None,
            disc: None,
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn minpoly(&self) -> &Poly {
        &self.minpoly
    }

    pub fn is_exact(&self) -> bool {
        self.t2.is_some()
    }

    /// Exact pairing matrix `T2(b_i, b_j)`.
    pub fn t2_gram(&self) -> Result<&QMat, FieldError> {
        self.t2.as_ref().ok_or(FieldError::InexactField)
    }

    /// Exact traces of the basis elements.
    pub fn trace_vector(&self) -> Result<&[Q], FieldError> {
        self.trace.as_deref().ok_or(FieldError::InexactField)
    }

    /// Field discriminant (with sign).
    pub fn disc(&self) -> Result<&Z, FieldError> {
        self.disc.as_ref().ok_or(FieldError::InexactField)
    }

    pub fn abs_disc(&self) -> Result<Z, FieldError> {
        Ok(self.disc()?.abs())
    }

    /// Exact trace of an element given by rational coordinates in the
    /// basis.
    pub fn element_trace(&self, a: &[Q]) -> Result<Q, FieldError> {
        let tr = self.trace_vector()?;
        assert_eq!(a.len(), self.degree);
        Ok(tr
            .iter()
            .zip(a)
            .map(|(t, c)| t.clone() * c.clone())
            .sum())
    }

    /// Product of two elements (power-basis coordinates), reduced modulo
    /// the minimal polynomial. Valid for power-basis kinds (cyclotomic and
    /// totally real both use the power basis).
    pub fn element_mul(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let pa = Poly::from_coeffs(a.to_vec());
        let pb = Poly::from_coeffs(b.to_vec());
        let r = pa.mul(&pb).rem(&self.minpoly);
        (0..self.degree).map(|i| r.coeff(i)).collect()
    }

    /// Coordinates of the complex conjugate of an element. Identity for
    /// totally real fields; for cyclotomics, the substitution `z -> z^(n-1)`.
    pub fn element_conj(&self, a: &[Q]) -> Result<Vec<Q>, FieldError> {
        match self.kind {
            FieldKind::TotallyReal => Ok(a.to_vec()),
            FieldKind::Cyclotomic(n) => {
                if n <= 2 {
                    return Ok(a.to_vec());
                }
                let zbar = Poly::from_coeffs(x_power_mod(n - 1, &self.minpoly));
                // Horner evaluation of a at zbar, modulo the minimal poly.
                let mut acc = Poly::zero();
                for i in (0..self.degree).rev() {
                    acc = acc
                        .mul(&zbar)
                        .rem(&self.minpoly)
                        .add(&Poly::from_coeffs(vec![a[i].clone()]));
                }
                Ok((0..self.degree).map(|i| acc.coeff(i)).collect())
            }
            FieldKind::General => Err(FieldError::InexactField),
        }
    }

    /// The pairing `T2(x, y) = Tr(x * conj(y))` on rational coordinates.
    pub fn pairing(&self, x: &[Q], y: &[Q]) -> Result<Q, FieldError> {
        let yc = self.element_conj(y)?;
        let prod = self.element_mul(x, &yc);
        self.element_trace(&prod)
    }
}

/// The direct-image lattice of the ring of integers: `Z^d` with the exact
/// pairing matrix. Its degree is `-1/2 log |disc|`.
pub fn minkowski_lattice(k: &NumberFieldData) -> Result<EuclideanLattice, FieldError> {
    let t2 = k.t2_gram()?;
    let e = EuclideanLattice::new(t2.clone())?;
    debug_assert_eq!(e.det(), Q::from_integer(k.abs_disc()?));
    Ok(e)
}

/// `sum_s |s(a)|^2 - sum_s Re s(a)` for an integral element `a`: the
/// pairing quadratic value minus the trace. Nonnegative for every integral
/// `a` (each embedding with `|z| >= 1` contributes `|z|^2 - Re z >= 0`, and
/// the norm product forces the large embeddings to dominate).
pub fn sumnorm_margin(k: &NumberFieldData, alpha: &[Z]) -> Result<Q, FieldError> {
    let t2 = k.t2_gram()?;
    let aq: Vec<Q> = alpha.iter().map(|x| Q::from_integer(x.clone())).collect();
    let quad = gram_quad(t2, &aq);
    let tr = k.element_trace(&aq)?;
    Ok(quad - tr)
}

/// Rational upper bound for `sqrt(x)`, exact on perfect squares.
fn sqrt_upper(x: &Q) -> Q {
    assert!(!x.is_negative());
    let pq = x.numer() * x.denom();
    let r = isqrt_floor(&pq);
    if &r * &r == pq {
        Q::new(r, x.denom().clone())
    } else {
        Q::new(r + 1, x.denom().clone())
    }
}

/// Verify the stronger split `sum |s(a)|^2 - sum |s(a)| >= 0` for integral
/// `a`, rigorously: by Cauchy-Schwarz `sum |s(a)| <= sqrt(d * T2(a))`, so
/// it suffices that `T2(a) >= sqrt(d * T2(a))`, i.e. `T2(a) >= d` - which
/// holds for every nonzero integral element (arithmetic-geometric mean plus
/// `|Norm| >= 1`).
pub fn stronger_sumnorm_check(k: &NumberFieldData, alpha: &[Z]) -> Result<bool, FieldError> {
    let t2 = k.t2_gram()?;
    if alpha.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    let aq: Vec<Q> = alpha.iter().map(|x| Q::from_integer(x.clone())).collect();
    let quad = gram_quad(t2, &aq);
    let bound = sqrt_upper(&(Q::from_integer(Z::from(k.degree() as u64)) * quad.clone()));
    Ok(quad >= bound)
}

/// Extension of scalars: the lattice `E tensor O_K` with pairing
/// `Kronecker(gram(E), T2)` in the basis `e_i tensor b_j`, together with
/// the integer matrix of the diagonal embedding `w -> w tensor 1`
/// (an isometry up to the factor `d`: `|Delta(w)|^2 = d |w|^2`).
pub fn extended_lattice(
    e: &EuclideanLattice,
    k: &NumberFieldData,
) -> Result<(EuclideanLattice, ZMat), FieldError> {
    let t2 = k.t2_gram()?;
    let d = k.degree();
    let n = e.rank();
    let gram = e.gram().kron(t2);
    let ext = EuclideanLattice::new(gram)?;
    let mut delta = ZMat::zeros(n * d, n);
    for i in 0..n {
        delta.set(i * d, i, Z::one());
    }
    Ok((ext, delta))
}

/// Verify that twisting the dual by the different is an isometry onto the
/// dual lattice: the codifferent `(1/f'(theta)) O_K` expands integrally in
/// the `T2`-dual basis with unimodular coordinate matrix `U`, and its
/// pairing Gram equals `U^T (T2)^(-1) U` exactly. Also rechecks
/// `det T2 = |disc|`.
pub fn omega_duality_check(k: &NumberFieldData) -> Result<bool, FieldError> {
    let t2 = k.t2_gram()?;
    let d = k.degree();
    let f = k.minpoly();
    let Some(h) = poly_inverse_mod(&f.derivative(), f) else {
        return Ok(false);
    };
    // Codifferent basis c_i = theta^i / f'(theta), coordinates in the
    // power basis.
    let coords = |p: &Poly| -> Vec<Q> { (0..d).map(|i| p.coeff(i)).collect() };
    let mut c: Vec<Vec<Q>> = Vec::with_capacity(d);
    let mut pw = h.clone();
    for _ in 0..d {
        c.push(coords(&pw));
        pw = pw.mul(&Poly::x()).rem(f);
    }
    // U[j][i] = T2(c_i, theta^j) must be integral with |det| = 1.
    let mut u_rows = vec![vec![Q::zero(); d]; d];
    for i in 0..d {
        for j in 0..d {
            let mut bj = vec![Q::zero(); d];
            bj[j] = Q::one();
            u_rows[j][i] = k.pairing(&c[i], &bj)?;
        }
    }
    let u = QMat::from_rows(u_rows);
    if !u.is_integral() || u.det().abs() != Q::one() {
        return Ok(false);
    }
    // Direct pairing Gram of the codifferent basis vs the pulled-back dual
    // Gram.
    let mut direct = vec![vec![Q::zero(); d]; d];
    for i in 0..d {
        for j in 0..d {
            direct[i][j] = k.pairing(&c[i], &c[j])?;
        }
    }
    let dual = t2.inverse().expect("pairing matrix is invertible");
    if QMat::from_rows(direct) != dual.pullback(&u) {
        return Ok(false);
    }
    Ok(t2.det() == Q::from_integer(k.abs_disc()?))
}

/// Verify the prime-power decomposition: the cyclotomic lattice for
/// `p^k` is, under the index split `m = i + j p^(k-1)`, the Kronecker
/// product of the scaled cube `p^(k-1) I` (size `p^(k-1)`) with the
/// cyclotomic lattice for `p`.
pub fn epn_isometry_check(p: u64, k: u32) -> bool {
    assert!(crate::arith::is_prime(p), "p must be prime");
    assert!(k >= 1);
    let n = p.pow(k);
    let big = NumberFieldData::cyclotomic(n);
    let small = NumberFieldData::cyclotomic(p);
    let g_big = big.t2_gram().unwrap();
    let g_small = small.t2_gram().unwrap();
    let m = p.pow(k - 1) as usize;
    let phi_p = small.degree();
    let cube = QMat::identity(m).scale(&Q::from_integer(Z::from(m as u64)));
    let expected = cube.kron(g_small);
    let idx = |t: usize| -> usize {
        let i = t % m;
        let j = t / m;
        i * phi_p + j
    };
    let dtot = big.degree();
    for t in 0..dtot {
        for s in 0..dtot {
            if g_big.at(t, s) != expected.at(idx(t), idx(s)) {
                return false;
            }
        }
    }
    true
}

/// Verify the coprime factorization: the product basis
/// `z_n1^i z_n2^j = z_n^(i n2 + j n1)` is an integral basis of the
/// `n1 n2`-th cyclotomic field (unimodular coordinates) and the pairing
/// matrix equals the Kronecker product of the factors' pairings.
pub fn n1n2_isometry_check(n1: u64, n2: u64) -> bool {
    assert!(n1.gcd(&n2) == 1, "arguments must be coprime");
    let n = n1 * n2;
    let f1 = NumberFieldData::cyclotomic(n1);
    let f2 = NumberFieldData::cyclotomic(n2);
    let fn_ = NumberFieldData::cyclotomic(n);
    let (d1, d2) = (f1.degree(), f2.degree());
    let d = fn_.degree();
    if d != d1 * d2 {
        return false;
    }
    // Exponents of the product basis in kron order (i, j) -> i*d2 + j.
    let exps: Vec<u64> = (0..d1)
        .flat_map(|i| (0..d2).map(move |j| (i as u64) * n2 + (j as u64) * n1))
        .collect();
    // Pairing identity via Ramanujan sums at exponent differences.
    let g1 = f1.t2_gram().unwrap();
    let g2 = f2.t2_gram().unwrap();
    let expected = g1.kron(g2);
    for (a, &ea) in exps.iter().enumerate() {
        for (b, &eb) in exps.iter().enumerate() {
            let val = Q::from_integer(ramanujan(n, ea as i64 - eb as i64));
            if &val != expected.at(a, b) {
                return false;
            }
        }
    }
    // Basis property: coordinates of z^e in the power basis form a
    // unimodular matrix.
    let cols: Vec<Vec<Q>> = exps
        .iter()
        .map(|&e| x_power_mod(e, fn_.minpoly()))
        .collect();
    let mut mat = QMat::zeros(d, d);
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            mat.set(i, j, v.clone());
        }
    }
    mat.is_integral() && mat.det().abs() == Q::one()
}

/// All integral elements with pairing norm at most `bound` (for margin
/// sweeps); includes zero.
pub fn elements_within(
    k: &NumberFieldData,
    bound: &Q,
    opts: &EnumOpts,
) -> Result<Vec<Vec<Z>>, FieldError> {
    let t2 = k.t2_gram()?;
    let zeros = vec![Q::zero(); k.degree()];
    let within = enumerate::vectors_within(t2, &zeros, bound, opts)
        .map_err(crate::lattice::LatticeError::from)?;
    Ok(within.points.into_iter().map(|(v, _)| v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi, zi};

    #[test]
    fn ramanujan_values() {
        for n in [1u64, 2, 3, 4, 5, 6, 12, 30] {
            assert_eq!(ramanujan(n, 0), Z::from(crate::arith::euler_phi(n)));
        }
        assert_eq!(ramanujan(5, 1), zi(-1));
        assert_eq!(ramanujan(4, 2), zi(-2));
        assert_eq!(ramanujan(9, 3), zi(-3));
        assert_eq!(ramanujan(6, 1), zi(1));
        // Periodicity and symmetry.
        assert_eq!(ramanujan(12, 5), ramanujan(12, -5));
        assert_eq!(ramanujan(12, 5), ramanujan(12, 17));
    }

    #[test]
    fn ramanujan_matches_algebraic_summation() {
        // Sum of z^(d k) over units d mod n, reduced modulo the n-th
        // cyclotomic polynomial, must be the constant c_n(k).
        for n in 1u64..=30 {
            let phi = cyclotomic_poly(n);
            for k in 0..n {
                let mut acc = Poly::zero();
                for d in 0..n.max(1) {
                    if n == 1 || d.gcd(&n) == 1 {
                        let e = (d * k) % n.max(1);
                        acc = acc.add(&Poly::from_coeffs(x_power_mod(e, &phi)));
                    }
                }
                let c = ramanujan(n, k as i64);
                assert!(acc.sub(&Poly::from_coeffs(vec![Q::from_integer(c)])).is_zero(),
                    "n={} k={}", n, k);
            }
        }
    }

    #[test]
    fn cyclotomic_grams() {
        let k3 = NumberFieldData::cyclotomic(3);
        assert_eq!(k3.t2_gram().unwrap(), &QMat::from_int_rows(&[&[2, -1], &[-1, 2]]));
        assert_eq!(k3.disc().unwrap(), &zi(-3));
        let k4 = NumberFieldData::cyclotomic(4);
        assert_eq!(k4.t2_gram().unwrap(), &QMat::from_int_rows(&[&[2, 0], &[0, 2]]));
        assert_eq!(k4.disc().unwrap(), &zi(-4));
        let k1 = NumberFieldData::cyclotomic(1);
        assert_eq!(k1.t2_gram().unwrap(), &QMat::identity(1));
        assert_eq!(k1.disc().unwrap(), &zi(1));
        // Prime case: diagonal p-1, off-diagonal -1; disc(Q(zeta5)) = 125.
        let k5 = NumberFieldData::cyclotomic(5);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { qi(4) } else { qi(-1) };
                assert_eq!(k5.t2_gram().unwrap().at(i, j), &want);
            }
        }
        assert_eq!(k5.disc().unwrap(), &zi(125));
    }

    #[test]
    fn prime_power_gram_three_cases() {
        for (p, kmax) in [(2u64, 3u32), (3, 3), (5, 2)] {
            for k in 1..=kmax {
                let n = p.pow(k);
                let field = NumberFieldData::cyclotomic(n);
                let g = field.t2_gram().unwrap();
                let d = field.degree();
                let pk1 = p.pow(k - 1) as i64;
                for i in 0..d {
                    for j in 0..d {
                        let diff = (i as i64 - j as i64).unsigned_abs();
                        let want = if diff == 0 {
                            qi((p as i64 - 1) * pk1)
                        } else if diff % (pk1 as u64) == 0 && (k == 1 || diff % (pk1 as u64 * p) != 0)
                        {
                            qi(-pk1)
                        } else if diff % (pk1 as u64) == 0 {
                            qi((p as i64 - 1) * pk1)
                        } else {
                            qi(0)
                        };
                        assert_eq!(g.at(i, j), &want, "n={} i={} j={}", n, i, j);
                    }
                }
            }
        }
    }

    #[test]
    fn totally_real_sqrt2() {
        let f = Poly::from_int_coeffs(&[-2, 0, 1]);
        let k = NumberFieldData::totally_real(f.clone()).unwrap();
        assert_eq!(k.t2_gram().unwrap(), &QMat::from_int_rows(&[&[2, 0], &[0, 4]]));
        assert_eq!(k.disc().unwrap(), &zi(8));
        assert_eq!(
            Q::from_integer(k.disc().unwrap().clone()),
            crate::poly::discriminant(&f)
        );
        // x^2 + 1 is not totally real.
        assert_eq!(
            NumberFieldData::totally_real(Poly::from_int_coeffs(&[1, 0, 1])).unwrap_err(),
            FieldError::NotTotallyReal { real: 0, degree: 2 }
        );
        // Repeated roots are rejected.
        assert_eq!(
            NumberFieldData::totally_real(Poly::from_int_coeffs(&[1, 2, 1])).unwrap_err(),
            FieldError::NotSquarefree
        );
        // General carrier refuses metric operations.
        let g = NumberFieldData::general(Poly::from_int_coeffs(&[-2, 0, 0, 1])).unwrap();
        assert_eq!(g.t2_gram().unwrap_err(), FieldError::InexactField);
        assert_eq!(minkowski_lattice(&g).unwrap_err(), FieldError::InexactField);
    }

    #[test]
    fn minkowski_lattice_degrees() {
        let e3 = minkowski_lattice(&NumberFieldData::cyclotomic(3)).unwrap();
        assert_eq!(e3.det(), qi(3));
        let eq = minkowski_lattice(&NumberFieldData::rational()).unwrap();
        assert_eq!(eq.gram(), &QMat::identity(1));
        let er = minkowski_lattice(
            &NumberFieldData::totally_real(Poly::from_int_coeffs(&[-2, 0, 1])).unwrap(),
        )
        .unwrap();
        assert_eq!(er.det(), qi(8));
    }

    #[test]
    fn sumnorm_margins() {
        let kq = NumberFieldData::rational();
        assert_eq!(sumnorm_margin(&kq, &[zi(0)]).unwrap(), qi(0));
        assert_eq!(sumnorm_margin(&kq, &[zi(1)]).unwrap(), qi(0));
        assert_eq!(sumnorm_margin(&kq, &[zi(3)]).unwrap(), qi(6));
        let k3 = NumberFieldData::cyclotomic(3);
        assert_eq!(sumnorm_margin(&k3, &[zi(0), zi(1)]).unwrap(), qi(3));
        // Sweep small elements: margin >= 0 and the stronger split holds.
        for k in [
            NumberFieldData::cyclotomic(5),
            NumberFieldData::cyclotomic(7),
            NumberFieldData::cyclotomic(8),
            NumberFieldData::totally_real(Poly::from_int_coeffs(&[-2, 0, 1])).unwrap(),
        ] {
            for a in elements_within(&k, &qi(20), &EnumOpts::default()).unwrap() {
                assert!(!sumnorm_margin(&k, &a).unwrap().is_negative(), "{:?}", a);
                assert!(stronger_sumnorm_check(&k, &a).unwrap(), "{:?}", a);
            }
        }
    }

    #[test]
    fn scalar_extension() {
        let z = EuclideanLattice::standard(1);
        let (ext, delta) = extended_lattice(&z, &NumberFieldData::cyclotomic(3)).unwrap();
        assert_eq!(ext.gram(), &QMat::from_int_rows(&[&[2, -1], &[-1, 2]]));
        assert_eq!(delta.at(0, 0), &zi(1));
        assert_eq!(delta.at(1, 0), &zi(0));
        let (extq, deltaq) = extended_lattice(&EuclideanLattice::standard(3),
            &NumberFieldData::rational()).unwrap();
        assert_eq!(extq.gram(), &QMat::identity(3));
        assert_eq!(deltaq, ZMat::identity(3));
        let (e4, _) = extended_lattice(&EuclideanLattice::standard(2),
            &NumberFieldData::cyclotomic(4)).unwrap();
        assert_eq!(e4.gram(), &QMat::identity(4).scale(&qi(2)));
        // |Delta(w)|^2 = d |w|^2 on samples.
        let a2 = EuclideanLattice::new(QMat::from_int_rows(&[&[2, -1], &[-1, 2]])).unwrap();
        let k5 = NumberFieldData::cyclotomic(5);
        let (ext5, d5) = extended_lattice(&a2, &k5).unwrap();
        for w in [[zi(1), zi(0)], [zi(2), zi(-3)], [zi(-1), zi(-1)]] {
            let img: Vec<Z> = (0..8)
                .map(|r| {
                    (0..2)
                        .map(|c| d5.at(r, c).clone() * w[c].clone())
                        .sum()
                })
                .collect();
            assert_eq!(ext5.norm_sq(&img), qi(4) * a2.norm_sq(&w));
        }
    }

    #[test]
    fn omega_duality() {
        assert!(omega_duality_check(&NumberFieldData::rational()).unwrap());
        assert!(omega_duality_check(&NumberFieldData::cyclotomic(3)).unwrap());
        assert!(omega_duality_check(&NumberFieldData::cyclotomic(5)).unwrap());
        assert!(omega_duality_check(&NumberFieldData::cyclotomic(8)).unwrap());
        assert!(omega_duality_check(
            &NumberFieldData::totally_real(Poly::from_int_coeffs(&[-2, 0, 1])).unwrap()
        )
        .unwrap());
        assert!(omega_duality_check(
            &NumberFieldData::totally_real(Poly::from_int_coeffs(&[-1, -3, 0, 1])).unwrap()
        )
        .unwrap());
    }

    #[test]
    fn decomposition_isometries() {
        assert!(epn_isometry_check(3, 1));
        assert!(epn_isometry_check(2, 2));
        assert!(epn_isometry_check(2, 3));
        assert!(epn_isometry_check(3, 2));
        assert!(epn_isometry_check(5, 2));
        assert!(n1n2_isometry_check(3, 4));
        assert!(n1n2_isometry_check(3, 5));
        assert!(n1n2_isometry_check(4, 5));
        assert!(n1n2_isometry_check(1, 7));
    }

    #[test]
    fn conjugation_and_pairing() {
        let k5 = NumberFieldData::cyclotomic(5);
        // conj(z) = z^4 = -1 - z - z^2 - z^3.
        let z = vec![qi(0), qi(1), qi(0), qi(0)];
        assert_eq!(
            k5.element_conj(&z).unwrap(),
            vec![qi(-1), qi(-1), qi(-1), qi(-1)]
        );
        // T2(z^i, z^j) recovers the Gram entries.
        let g = k5.t2_gram().unwrap().clone();
        for i in 0..4 {
            for j in 0..4 {
                let mut bi = vec![qi(0); 4];
                bi[i] = qi(1);
                let mut bj = vec![qi(0); 4];
                bj[j] = qi(1);
                assert_eq!(&k5.pairing(&bi, &bj).unwrap(), g.at(i, j));
            }
        }
        // Norm of 1 + z in Q(zeta5): T2 = sum over 4 embeddings.
        let one_plus = vec![qi(1), qi(1), qi(0), qi(0)];
        assert_eq!(k5.pairing(&one_plus, &one_plus).unwrap(), q(6, 1));
    }
}
