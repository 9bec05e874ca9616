//! Dense univariate polynomials over the rationals: ring operations,
//! Euclidean division, modular inverses, cyclotomic polynomials, power sums
//! of roots (Newton's identities), resultants and discriminants, and Sturm
//! sequences for exact real-root counting and isolation.
//!
//! Coefficient `i` of a `Poly` is the coefficient of `x^i`; the
//! representation is kept trimmed (no trailing zeros), with the zero
//! polynomial stored as an empty vector.

use crate::arith::divisors;
use crate::rational::{qi, Q};
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Poly(pub Vec<Q>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn one() -> Self {
        Poly(vec![qi(1)])
    }

    /// Monomial `x`.
    pub fn x() -> Self {
        Poly(vec![qi(0), qi(1)])
    }

    pub fn from_coeffs(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(|t| t.is_zero()) {
            c.pop();
        }
        Poly(c)
    }

    pub fn from_int_coeffs(c: &[i64]) -> Self {
        Poly::from_coeffs(c.iter().map(|&n| qi(n)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn leading(&self) -> Q {
        self.0.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.0.len().max(other.0.len());
        let mut c = Vec::with_capacity(n);
        for i in 0..n {
            c.push(self.coeff(i) + other.coeff(i));
        }
        Poly::from_coeffs(c)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly(self.0.iter().map(|c| c.clone() * s).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Q::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                c[i + j] += a.clone() * b;
            }
        }
        Poly::from_coeffs(c)
    }

    /// Euclidean division: returns `(quotient, remainder)` with
    /// `self = q * div + r`, `deg r < deg div`. Panics if `div` is zero.
    pub fn divmod(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by the zero polynomial");
        let dd = div.degree().unwrap();
        let lead_inv = div.leading().recip();
        let mut rem = self.0.clone();
        if rem.len() < div.0.len() {
            return (Poly::zero(), Poly::from_coeffs(rem));
        }
        let mut quo = vec![Q::zero(); rem.len() - dd];
        for k in (dd..rem.len()).rev() {
            let c = rem[k].clone() * &lead_inv;
            if !c.is_zero() {
                quo[k - dd] = c.clone();
                for (i, dc) in div.0.iter().enumerate() {
                    rem[k - dd + i] -= c.clone() * dc;
                }
            }
            rem[k] = Q::zero();
        }
        (Poly::from_coeffs(quo), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, div: &Poly) -> Poly {
        self.divmod(div).1
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = Q::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly::from_coeffs(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * qi(i as i64))
                .collect(),
        )
    }

    /// Divides all coefficients by the leading one.
    pub fn monic(&self) -> Poly {
        assert!(!self.is_zero());
        self.scale(&self.leading().recip())
    }

    /// `true` when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|c| c.denom().is_one())
    }
}

/// Monic gcd of two polynomials (zero if both are zero).
pub fn poly_gcd(a: &Poly, b: &Poly) -> Poly {
    let mut a = a.clone();
    let mut b = b.clone();
    while !b.is_zero() {
        let r = a.rem(&b);
        a = b;
        b = r;
    }
    if a.is_zero() {
        a
    } else {
        a.monic()
    }
}

/// Extended gcd: returns `(g, s, t)` monic `g = gcd(a,b)` with
/// `s*a + t*b = g`.
pub fn poly_egcd(a: &Poly, b: &Poly) -> (Poly, Poly, Poly) {
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (Poly::one(), Poly::zero());
    let (mut t0, mut t1) = (Poly::zero(), Poly::one());
    while !r1.is_zero() {
        let (q, r) = r0.divmod(&r1);
        let s = s0.sub(&q.mul(&s1));
        let t = t0.sub(&q.mul(&t1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
        t0 = t1;
        t1 = t;
    }
    if r0.is_zero() {
        (r0, s0, t0)
    } else {
        let inv = r0.leading().recip();
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }
}

/// Inverse of `a` modulo `m` (requires `gcd(a, m) = 1`).
pub fn poly_inverse_mod(a: &Poly, m: &Poly) -> Option<Poly> {
    let (g, s, _) = poly_egcd(a, m);
    if g.degree() == Some(0) {
        Some(s.rem(m))
    } else {
        None
    }
}

/// `x^n - 1`.
pub fn x_pow_minus_one(n: u64) -> Poly {
    let mut c = vec![Q::zero(); n as usize + 1];
    c[0] = qi(-1);
    c[n as usize] = qi(1);
    Poly::from_coeffs(c)
}

/// The `n`-th cyclotomic polynomial, computed by exact division of
/// `x^n - 1` by the cyclotomic polynomials of the proper divisors of `n`.
/// Integral and monic of degree `phi(n)`.
pub fn cyclotomic_poly(n: u64) -> Poly {
    assert!(n >= 1);
    let mut num = x_pow_minus_one(n);
    for d in divisors(n) {
        if d < n {
            let (q, r) = num.divmod(&cyclotomic_poly(d));
            debug_assert!(r.is_zero(), "cyclotomic division must be exact");
            num = q;
        }
    }
    num
}

/// Power sums `p_0, ..., p_upto` of the roots of a monic polynomial,
/// via Newton's identities. `p_k = sum of (root_i)^k` is rational.
pub fn power_sums(f: &Poly, upto: usize) -> Vec<Q> {
    assert!(f.is_monic(), "power sums require a monic polynomial");
    let d = f.degree().expect("nonzero polynomial");
    let a = |m: i64| -> Q {
        if m < 0 {
            Q::zero()
        } else {
            f.coeff(m as usize)
        }
    };
    let mut p: Vec<Q> = Vec::with_capacity(upto + 1);
    p.push(qi(d as i64));
    for k in 1..=upto {
        let mut s = Q::zero();
        for i in 1..k.min(d + 1) {
            s += a(d as i64 - i as i64) * p[k - i].clone();
        }
        if k <= d {
            s += qi(k as i64) * a(d as i64 - k as i64);
        }
        p.push(-s);
    }
    p
}

/// Resultant of `f` and `g` via the Sylvester matrix (exact).
pub fn resultant(f: &Poly, g: &Poly) -> Q {
    let (m, n) = match (f.degree(), g.degree()) {
        (Some(m), Some(n)) => (m, n),
        // Res(f, 0) = 0 unless f is a nonzero constant (empty product = 1).
        (Some(0), None) | (None, Some(0)) => return qi(1),
        _ => return Q::zero(),
    };
    if m == 0 {
        return crate::rational::pow_q(&f.coeff(0), n as i64);
    }
    if n == 0 {
        return crate::rational::pow_q(&g.coeff(0), m as i64);
    }
    let size = m + n;
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![Q::zero(); size];
        for j in 0..=m {
            row[i + j] = f.coeff(m - j);
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![Q::zero(); size];
        for j in 0..=n {
            row[i + j] = g.coeff(n - j);
        }
        rows.push(row);
    }
    det_rational_rows(rows)
}

/// Discriminant of a monic polynomial:
/// `(-1)^{d(d-1)/2} * Res(f, f')`.
pub fn discriminant(f: &Poly) -> Q {
    assert!(f.is_monic());
    let d = f.degree().expect("nonzero polynomial") as i64;
    let sign = if (d * (d - 1) / 2) % 2 == 0 { 1 } else { -1 };
    resultant(f, &f.derivative()) * qi(sign)
}

/// Gaussian-elimination determinant on owned rows (helper shared with the
/// Sylvester construction; the general matrix type lives in `linalg`).
fn det_rational_rows(mut rows: Vec<Vec<Q>>) -> Q {
    let n = rows.len();
    let mut det = qi(1);
    for col in 0..n {
        let pivot = (col..n).find(|&r| !rows[r][col].is_zero());
        let Some(p) = pivot else {
            return Q::zero();
        };
        if p != col {
            rows.swap(p, col);
            det = -det;
        }
        let pv = rows[col][col].clone();
        det *= pv.clone();
        for r in col + 1..n {
            if rows[r][col].is_zero() {
                continue;
            }
            let factor = rows[r][col].clone() / pv.clone();
            for c in col..n {
                let sub = factor.clone() * rows[col][c].clone();
                rows[r][c] -= sub;
            }
        }
    }
    det
}

/// Square-free part `f / gcd(f, f')`, monic.
pub fn squarefree_part(f: &Poly) -> Poly {
    let g = poly_gcd(f, &f.derivative());
    if g.degree() == Some(0) || g.is_zero() {
        return f.monic();
    }
    f.divmod(&g).0.monic()
}

/// Sturm sequence of a square-free polynomial.
fn sturm_sequence(f: &Poly) -> Vec<Poly> {
    let mut seq = vec![f.clone(), f.derivative()];
    loop {
        let k = seq.len();
        if seq[k - 1].is_zero() {
            seq.pop();
            return seq;
        }
        let r = seq[k - 2].rem(&seq[k - 1]).neg();
        if r.is_zero() {
            return seq;
        }
        seq.push(r);
    }
}

fn sign_changes_at(seq: &[Poly], x: &Q) -> usize {
    let mut last: Option<bool> = None; // sign as is_positive
    let mut changes = 0;
    for p in seq {
        let v = p.eval(x);
        if v.is_zero() {
            continue;
        }
        let s = v.is_positive();
        if let Some(prev) = last {
            if prev != s {
                changes += 1;
            }
        }
        last = Some(s);
    }
    changes
}

/// Number of distinct real roots of `f` in the half-open interval `(a, b]`.
pub fn count_real_roots_in(f: &Poly, a: &Q, b: &Q) -> usize {
    assert!(a <= b);
    let sf = squarefree_part(f);
    let seq = sturm_sequence(&sf);
    sign_changes_at(&seq, a) - sign_changes_at(&seq, b)
}

/// A bound `M` with all real roots of `f` in `(-M, M)` (Cauchy bound).
pub fn root_bound(f: &Poly) -> Q {
    let d = f.degree().expect("nonzero polynomial");
    let lead = f.leading();
    let mut m = Q::zero();
    for i in 0..d {
        let r = (f.coeff(i) / lead.clone()).abs();
        if r > m {
            m = r;
        }
    }
    m + qi(1)
}

/// Number of distinct real roots of `f`.
pub fn count_real_roots(f: &Poly) -> usize {
    let m = root_bound(f);
    count_real_roots_in(f, &-m.clone(), &m)
}

/// Encloses the largest real root of `f` within an interval of width at
/// most `width`. Requires `f` to have at least one real root.
pub fn largest_real_root_enclosure(f: &Poly, width: &Q) -> (Q, Q) {
    let sf = squarefree_part(f);
    let seq = sturm_sequence(&sf);
    let m = root_bound(&sf);
    let (mut lo, mut hi) = (-m.clone(), m.clone());
    assert!(
        sign_changes_at(&seq, &lo) > sign_changes_at(&seq, &hi),
        "polynomial has no real root"
    );
    // Invariant: the largest root lies in (lo, hi].
    while hi.clone() - lo.clone() > *width {
        let mid = (lo.clone() + hi.clone()) / qi(2);
        if sign_changes_at(&seq, &mid) > sign_changes_at(&seq, &hi) {
            lo = mid; // a root remains in (mid, hi]
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Decides exactly whether all real roots of `f` are `<= bound`.
pub fn all_real_roots_at_most(f: &Poly, bound: &Q) -> bool {
    let m = root_bound(f);
    if *bound >= m {
        return true;
    }
    count_real_roots_in(f, bound, &m) == 0
}

/// Reduction of `x^e` modulo a monic polynomial, as a coefficient vector of
/// length `deg m` (used to express powers of an algebraic number on the
/// power basis).
pub fn x_power_mod(e: u64, m: &Poly) -> Vec<Q> {
    let d = m.degree().expect("nonzero modulus");
    assert!(m.is_monic());
    let mut acc = Poly::one();
    let mut base = Poly::x().rem(m);
    let mut e = e;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base).rem(m);
        }
        base = base.mul(&base).rem(m);
        e >>= 1;
    }
    let mut out = vec![Q::zero(); d];
    for (i, c) in acc.0.iter().enumerate() {
        out[i] = c.clone();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn ring_ops_and_division() {
        let f = Poly::from_int_coeffs(&[-1, 0, 1]); // x^2 - 1
        let g = Poly::from_int_coeffs(&[1, 1]); // x + 1
        let (quo, rem) = f.divmod(&g);
        assert_eq!(quo, Poly::from_int_coeffs(&[-1, 1]));
        assert!(rem.is_zero());
        assert_eq!(f.eval(&qi(3)), qi(8));
        assert_eq!(f.derivative(), Poly::from_int_coeffs(&[0, 2]));
    }

    #[test]
    fn cyclotomics() {
        assert_eq!(cyclotomic_poly(1), Poly::from_int_coeffs(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2), Poly::from_int_coeffs(&[1, 1]));
        assert_eq!(cyclotomic_poly(3), Poly::from_int_coeffs(&[1, 1, 1]));
        assert_eq!(cyclotomic_poly(4), Poly::from_int_coeffs(&[1, 0, 1]));
        assert_eq!(cyclotomic_poly(6), Poly::from_int_coeffs(&[1, -1, 1]));
        assert_eq!(
            cyclotomic_poly(12),
            Poly::from_int_coeffs(&[1, 0, -1, 0, 1])
        );
        // degree phi(n), monic, integral
        for n in 1..=30u64 {
            let p = cyclotomic_poly(n);
            assert_eq!(p.degree(), Some(crate::arith::euler_phi(n) as usize));
            assert!(p.is_monic());
            assert!(p.is_integral());
        }
    }

    #[test]
    fn newton_power_sums() {
        // x^2 - 2: roots ±sqrt(2); p_k = 0 for odd k, 2*2^{k/2} for even.
        let f = Poly::from_int_coeffs(&[-2, 0, 1]);
        let p = power_sums(&f, 6);
        assert_eq!(p[0], qi(2));
        assert_eq!(p[1], qi(0));
        assert_eq!(p[2], qi(4));
        assert_eq!(p[3], qi(0));
        assert_eq!(p[4], qi(8));
        assert_eq!(p[6], qi(16));
        // x^2 + 1: roots ±i; p_2 = -2, p_4 = 2.
        let g = Poly::from_int_coeffs(&[1, 0, 1]);
        let pg = power_sums(&g, 4);
        assert_eq!(pg[2], qi(-2));
        assert_eq!(pg[4], qi(2));
        // Phi_3 = x^2 + x + 1: p_1 = -1 (sum of primitive cube roots).
        let c3 = cyclotomic_poly(3);
        let pc = power_sums(&c3, 3);
        assert_eq!(pc[1], qi(-1));
        assert_eq!(pc[2], qi(-1));
        assert_eq!(pc[3], qi(2));
    }

    #[test]
    fn resultants_and_discriminants() {
        // disc(x^2 - 2) = 8
        assert_eq!(discriminant(&Poly::from_int_coeffs(&[-2, 0, 1])), qi(8));
        // disc(x^2 + 1) = -4
        assert_eq!(discriminant(&Poly::from_int_coeffs(&[1, 0, 1])), qi(-4));
        // disc(Phi_3) = -3
        assert_eq!(discriminant(&cyclotomic_poly(3)), qi(-3));
        // disc(Phi_5) = 125
        assert_eq!(discriminant(&cyclotomic_poly(5)), qi(125));
        // Res(x^2-1, x-2) = f(2) = 3 (lead of g is 1)
        let f = Poly::from_int_coeffs(&[-1, 0, 1]);
        let g = Poly::from_int_coeffs(&[-2, 1]);
        assert_eq!(resultant(&f, &g), qi(3));
    }

    #[test]
    fn sturm_counts() {
        // (x^2 - 2)(x^2 + 1): two real roots
        let f = Poly::from_int_coeffs(&[-2, 0, 1]).mul(&Poly::from_int_coeffs(&[1, 0, 1]));
        assert_eq!(count_real_roots(&f), 2);
        assert_eq!(count_real_roots_in(&f, &qi(0), &qi(2)), 1);
        assert_eq!(count_real_roots_in(&f, &qi(-2), &qi(0)), 1);
        // Repeated roots are counted once.
        let g = Poly::from_int_coeffs(&[-1, 1]).mul(&Poly::from_int_coeffs(&[-1, 1]));
        assert_eq!(count_real_roots(&g), 1);
        // Largest root of x^2 - 2 is sqrt(2) ≈ 1.41421
        let (lo, hi) = largest_real_root_enclosure(
            &Poly::from_int_coeffs(&[-2, 0, 1]),
            &q(1, 1_000_000),
        );
        assert!(lo < hi);
        assert!(hi.clone() - lo.clone() <= q(1, 1_000_000));
        // The root lies in (lo, hi]: lo is strictly below sqrt(2), hi at or
        // above it.
        assert!(lo.clone() * lo < qi(2));
        assert!(hi.clone() * hi >= qi(2));
        assert!(all_real_roots_at_most(
            &Poly::from_int_coeffs(&[-2, 0, 1]),
            &q(3, 2)
        ));
        assert!(!all_real_roots_at_most(
            &Poly::from_int_coeffs(&[-2, 0, 1]),
            &q(7, 5)
        ));
        // Boundary: all roots of (x-2)^2 are <= 2.
        let h = Poly::from_int_coeffs(&[4, -4, 1]);
        assert!(all_real_roots_at_most(&h, &qi(2)));
        assert!(!all_real_roots_at_most(&h, &q(19, 10)));
    }

    #[test]
    fn modular_inverse() {
        let m = cyclotomic_poly(5);
        let a = Poly::from_int_coeffs(&[1, 1]); // 1 + x
        let inv = poly_inverse_mod(&a, &m).unwrap();
        let prod = a.mul(&inv).rem(&m);
        assert_eq!(prod, Poly::one());
    }

    #[test]
    fn x_power_mod_cyclotomic() {
        let m = cyclotomic_poly(4); // x^2 + 1
        assert_eq!(x_power_mod(2, &m), vec![qi(-1), qi(0)]);
        assert_eq!(x_power_mod(3, &m), vec![qi(0), qi(-1)]);
        assert_eq!(x_power_mod(4, &m), vec![qi(1), qi(0)]);
    }
}
