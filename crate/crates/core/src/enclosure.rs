//! Certified real arithmetic.
//!
//! Three layers:
//!
//! * [`Enc`] — an interval with exact rational endpoints, guaranteed to
//!   contain the mathematical value. Logarithms of positive rationals are
//!   produced by the `atanh` series with an explicit geometric tail bound;
//!   `pi` comes from Machin's formula with alternating-series tails.
//! * [`ExactLn`] — the field of values `coeff * ln(base)` (`coeff` rational,
//!   `base` positive rational), closed under addition and rational scaling,
//!   with *exact* order comparisons by cross-powering: no precision is
//!   involved at all.
//! * [`LogValue`] — the reporting type `{value, abs_error}`: a double plus a
//!   rigorous absolute-error radius, produced from an enclosure. Minus
//!   infinity (`value = -inf, abs_error = 0`) encodes logarithms of zero
//!   (e.g. sizes of split extensions).
//!
//! Working precision (bits of absolute error for the elementary enclosures)
//! defaults to 128 and is configurable through the environment variable
//! `ARAKELOV_PRECISION_BITS`, capped at 256.

use crate::rational::{fmt_q, pow_q, q, q_to_f64, qi, Q, Z};
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::sync::OnceLock;

pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const MAX_PRECISION_BITS: u32 = 256;
/// Internal precision for the cached constants `ln 2` and `pi`; always at
/// least `MAX_PRECISION_BITS` plus slack for accumulated interval widening.
const CONST_BITS: u32 = MAX_PRECISION_BITS + 64;

/// Working precision in bits: `ARAKELOV_PRECISION_BITS`, default 128,
/// clamped to `[32, 256]`.
pub fn precision_bits() -> u32 {
    static BITS: OnceLock<u32> = OnceLock::new();
    *BITS.get_or_init(|| {
        std::env::var("ARAKELOV_PRECISION_BITS")
            .ok()
            .and_then(|s| s.trim().parse::<u32>().ok())
            .map(|b| b.clamp(32, MAX_PRECISION_BITS))
            .unwrap_or(DEFAULT_PRECISION_BITS)
    })
}

fn two_pow_neg(bits: u32) -> Q {
    Q::new(Z::one(), Z::one() << bits)
}

// ---------------------------------------------------------------------------
// Interval with rational endpoints
// ---------------------------------------------------------------------------

/// A closed interval `[lo, hi]` with rational endpoints containing the value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enc {
    pub lo: Q,
    pub hi: Q,
}

impl Enc {
    pub fn point(x: Q) -> Self {
        Enc { lo: x.clone(), hi: x }
    }

    pub fn new(lo: Q, hi: Q) -> Self {
        assert!(lo <= hi, "inverted enclosure");
        Enc { lo, hi }
    }

    pub fn width(&self) -> Q {
        self.hi.clone() - self.lo.clone()
    }

    pub fn mid(&self) -> Q {
        (self.lo.clone() + self.hi.clone()) / qi(2)
    }

    pub fn add(&self, other: &Enc) -> Enc {
        Enc::new(
            self.lo.clone() + other.lo.clone(),
            self.hi.clone() + other.hi.clone(),
        )
    }

    pub fn sub(&self, other: &Enc) -> Enc {
        Enc::new(
            self.lo.clone() - other.hi.clone(),
            self.hi.clone() - other.lo.clone(),
        )
    }

    pub fn neg(&self) -> Enc {
        Enc::new(-self.hi.clone(), -self.lo.clone())
    }

    pub fn scale(&self, s: &Q) -> Enc {
        if s.is_negative() {
            Enc::new(self.hi.clone() * s, self.lo.clone() * s)
        } else {
            Enc::new(self.lo.clone() * s, self.hi.clone() * s)
        }
    }

    pub fn mul(&self, other: &Enc) -> Enc {
        let candidates = [
            self.lo.clone() * other.lo.clone(),
            self.lo.clone() * other.hi.clone(),
            self.hi.clone() * other.lo.clone(),
            self.hi.clone() * other.hi.clone(),
        ];
        Enc::new(
            candidates.iter().min().unwrap().clone(),
            candidates.iter().max().unwrap().clone(),
        )
    }

    /// `true` when the enclosure proves `self <= other`.
    pub fn proves_le(&self, other: &Enc) -> bool {
        self.hi <= other.lo
    }

    /// `true` when the enclosure proves `self > other` (refutes `<=`).
    pub fn refutes_le(&self, other: &Enc) -> bool {
        self.lo > other.hi
    }

    /// Three-way comparison of enclosed values.
    pub fn cmp3(&self, other: &Enc) -> Cmp3 {
        if self.hi < other.lo {
            Cmp3::Less
        } else if self.lo > other.hi {
            Cmp3::Greater
        } else {
            Cmp3::Overlap
        }
    }

    /// Whether `self <= other + tol` cannot be refuted: the tolerance-soft
    /// acceptance reading of "within tol".
    pub fn le_within(&self, other: &Enc, tol: &Q) -> bool {
        self.lo <= other.hi.clone() + tol
    }

    /// Whether `|self - other| <= tol` cannot be refuted.
    pub fn eq_within(&self, other: &Enc, tol: &Q) -> bool {
        self.le_within(other, tol) && other.le_within(self, tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp3 {
    Less,
    Greater,
    Overlap,
}

// ---------------------------------------------------------------------------
// Elementary enclosures
// ---------------------------------------------------------------------------

/// `atanh(t)` for rational `|t| <= 1/3`, with tail bound
/// `|tail| <= |t|^(2K+1) / ((2K+1)(1 - t^2))`.
fn atanh_enc(t: &Q, bits: u32) -> Enc {
    debug_assert!(t.abs() <= q(1, 3));
    let eps = two_pow_neg(bits);
    let t2 = t.clone() * t;
    let mut term = t.clone(); // t^(2k+1)
    let mut sum = Q::zero();
    let mut k: i64 = 0;
    loop {
        sum += term.clone() / qi(2 * k + 1);
        term *= t2.clone();
        k += 1;
        // Tail after k terms: sum_{j>=k} |t|^(2j+1)/(2j+1)
        //   <= |t|^(2k+1) / ((2k+1)(1-t^2)).
        let tail = term.abs() / (qi(2 * k + 1) * (qi(1) - t2.clone()));
        if tail <= eps {
            // Remaining terms all share the sign of t.
            return if t.is_negative() {
                Enc::new(sum.clone() - tail, sum)
            } else {
                Enc::new(sum.clone(), sum + tail)
            };
        }
    }
}

/// `atan(1/x)` for integer `x >= 2`, by the alternating Taylor series.
fn atan_inv_enc(x: i64, bits: u32) -> Enc {
    assert!(x >= 2);
    let eps = two_pow_neg(bits);
    let inv = q(1, x);
    let inv2 = inv.clone() * &inv;
    let mut term = inv; // 1/x^(2k+1)
    let mut sum = Q::zero();
    let mut k: i64 = 0;
    loop {
        let signed = if k % 2 == 0 { term.clone() } else { -term.clone() };
        sum += signed / qi(2 * k + 1);
        term *= inv2.clone();
        k += 1;
        let next = term.clone() / qi(2 * k + 1);
        if next <= eps {
            // Alternating series: the value lies between consecutive
            // partial sums.
            return if k % 2 == 0 {
                Enc::new(sum.clone(), sum + next)
            } else {
                Enc::new(sum.clone() - next, sum)
            };
        }
    }
}

/// `ln 2 = 2 atanh(1/3)`, cached at `CONST_BITS` precision.
pub fn ln2_enc() -> &'static Enc {
    static LN2: OnceLock<Enc> = OnceLock::new();
    LN2.get_or_init(|| atanh_enc(&q(1, 3), CONST_BITS + 2).scale(&qi(2)))
}

/// `pi = 16 atan(1/5) - 4 atan(1/239)`, cached at `CONST_BITS` precision.
pub fn pi_enc() -> &'static Enc {
    static PI: OnceLock<Enc> = OnceLock::new();
    PI.get_or_init(|| {
        let a = atan_inv_enc(5, CONST_BITS + 6).scale(&qi(16));
        let b = atan_inv_enc(239, CONST_BITS + 6).scale(&qi(4));
        a.sub(&b)
    })
}

/// Natural logarithm of a positive rational, enclosed to `2^-bits`.
pub fn ln_q(x: &Q, bits: u32) -> Enc {
    assert!(x.is_positive(), "ln of a non-positive rational");
    if x.is_one() {
        return Enc::point(Q::zero());
    }
    // Normalize x = m * 2^e with m in [3/4, 3/2).
    let mut m = x.clone();
    let mut e: i64 = 0;
    let lo_bound = q(3, 4);
    let hi_bound = q(3, 2);
    while m >= hi_bound {
        m /= qi(2);
        e += 1;
    }
    while m < lo_bound {
        m *= qi(2);
        e -= 1;
    }
    // A bulky mantissa (e.g. an endpoint of another enclosure) would drag
    // giant exact rationals through the series; replace it by a nearby
    // dyadic and widen by the perturbation: for m, m~ >= 5/8,
    // |ln m - ln m~| <= |m - m~| / (5/8) <= 2^-(bb-1).
    let mut widen = Q::zero();
    let mantissa_bits = (m.numer().bits() + m.denom().bits()) as u32;
    if mantissa_bits > 2 * bits + 64 {
        let bb = bits + 8;
        let scaled = (m.numer() << bb) / m.denom(); // floor; m > 0
        m = Q::new(scaled, Z::one() << bb);
        widen = two_pow_neg(bb - 1);
    }
    // ln m = 2 atanh((m-1)/(m+1)), |t| <= 1/5 + epsilon.
    let t = (m.clone() - qi(1)) / (m + qi(1));
    let ln_m = atanh_enc(&t, bits + 2).scale(&qi(2));
    let ln_2e = ln2_enc().scale(&qi(e));
    let exact = ln_m.add(&ln_2e);
    Enc::new(exact.lo - widen.clone(), exact.hi + widen)
}

/// `ln pi`.
pub fn ln_pi(bits: u32) -> Enc {
    let p = pi_enc();
    Enc::new(ln_q(&p.lo, bits + 2).lo, ln_q(&p.hi, bits + 2).hi)
}

/// `pi^k` for `k >= 0` as an interval (endpoints are positive).
pub fn pi_pow(k: u32) -> Enc {
    let p = pi_enc();
    Enc::new(pow_q(&p.lo, k as i64), pow_q(&p.hi, k as i64))
}

/// Exact three-way comparison `pi^k` vs a positive rational `c`
/// (`pi^k` is irrational for `k >= 1`, so this never returns `Equal`
/// unless `k = 0` and `c = 1`).
pub fn cmp_pi_pow_vs_q(k: u32, c: &Q) -> Ordering {
    if k == 0 {
        return qi(1).cmp(c);
    }
    let e = pi_pow(k);
    if e.hi < *c {
        Ordering::Less
    } else if e.lo > *c {
        Ordering::Greater
    } else {
        // CONST_BITS leaves enormous margin; a pi-power would need to agree
        // with a rational to ~10^-96 for this to trigger.
        unreachable!("pi^{k} undecided against {} at construction precision", fmt_q(c))
    }
}

/// Double factorial `r!! = r (r-2) (r-4) ...` as a big integer.
fn double_factorial(r: u64) -> Z {
    let mut acc = Z::one();
    let mut k = r;
    while k >= 2 {
        acc *= Z::from(k);
        k -= 2;
    }
    acc
}

fn factorial(r: u64) -> Z {
    let mut acc = Z::one();
    for k in 2..=r {
        acc *= Z::from(k);
    }
    acc
}

/// `ln Gamma(r/2 + 1)` for integer `r >= 0`, exact up to the `ln pi` term:
/// even `r`: `ln((r/2)!)`; odd `r`: `ln(sqrt(pi) r!! / 2^((r+1)/2))`.
pub fn ln_gamma_half_plus_one(r: u64, bits: u32) -> Enc {
    if r % 2 == 0 {
        ln_q(&Q::from_integer(factorial(r / 2)), bits)
    } else {
        let rat = Q::new(double_factorial(r), Z::one() << ((r + 1) / 2));
        let half_ln_pi = ln_pi(bits + 2).scale(&q(1, 2));
        ln_q(&rat, bits + 2).add(&half_ln_pi)
    }
}

/// The slope-theoretic Stirling-type function
/// `psi(r) = (1/r) ln Gamma(r/2 + 1) - (1/2) ln(pi/4)` for integer `r >= 1`.
/// Increasing in `r`, with `psi(1) = 0` and `psi(r) < (1/2) ln r` for
/// `r > 1`.
pub fn psi_fn(r: u64, bits: u32) -> Enc {
    assert!(r >= 1);
    let lg = ln_gamma_half_plus_one(r, bits + 4).scale(&Q::new(Z::one(), Z::from(r)));
    // -(1/2) ln(pi/4) = -(1/2) ln pi + ln 2
    let corr = ln_pi(bits + 4)
        .scale(&q(-1, 2))
        .add(&ln2_enc().clone());
    lg.add(&corr)
}

/// `ln v_n` where `v_n = pi^(n/2) / Gamma(n/2 + 1)` is the volume of the
/// unit ball in dimension `n`.
pub fn ln_ball_volume(n: u64, bits: u32) -> Enc {
    let half_n = Q::new(Z::from(n), Z::from(2u32));
    ln_pi(bits + 4)
        .scale(&half_n)
        .sub(&ln_gamma_half_plus_one(n, bits + 4))
}

/// Decides `psi(r) <= (1/2) ln r + (strictness)` exactly by clearing
/// denominators into a comparison of `Gamma(r/2+1)^2` vs `(r pi / 4)^r`,
/// i.e. a pure `pi`-power comparison. Returns the ordering of
/// `psi(r) - (1/2) ln r` against zero.
pub fn cmp_psi_vs_half_ln(r: u64) -> Ordering {
    assert!(r >= 1);
    // psi(r) <= (1/2) ln r  <=>  Gamma(r/2+1)^2 <= (r pi/4)^r.
    // Even r: ((r/2)!)^2 vs (r/4)^r pi^r  -> compare pi^r vs rational.
    // Odd r:  pi (r!!)^2 / 2^(r+1) vs (r/4)^r pi^r -> pi^(r-1) vs rational.
    if r == 1 {
        return Ordering::Equal; // psi(1) = 0 = (1/2) ln 1
    }
    let (k, c) = if r % 2 == 0 {
        let g2 = Q::from_integer(factorial(r / 2)).pow(2);
        let rat = g2 / pow_q(&Q::new(Z::from(r), Z::from(4u32)), r as i64);
        (r as u32, rat)
    } else {
        let g2 = Q::new(
            double_factorial(r).pow(2),
            Z::one() << (r + 1),
        );
        let rat = g2 / pow_q(&Q::new(Z::from(r), Z::from(4u32)), r as i64);
        (r as u32 - 1, rat)
    };
    // Gamma^2 <= (r/4)^r pi^r  <=>  c <= pi^k.
    cmp_pi_pow_vs_q(k, &c).reverse()
}

// ---------------------------------------------------------------------------
// Exact logarithms of rationals
// ---------------------------------------------------------------------------

/// The exact quantity `coeff * ln(base)` with `base` a positive rational.
/// Closed under negation, rational scaling and addition; ordered exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactLn {
    coeff: Q,
    base: Q,
}

impl ExactLn {
    pub fn zero() -> Self {
        ExactLn { coeff: Q::zero(), base: qi(1) }
    }

    /// `ln(base)`.
    pub fn ln(base: Q) -> Self {
        assert!(base.is_positive(), "ln of a non-positive rational");
        ExactLn { coeff: qi(1), base }.normalize()
    }

    /// `coeff * ln(base)`.
    pub fn mul_ln(coeff: Q, base: Q) -> Self {
        assert!(base.is_positive(), "ln of a non-positive rational");
        ExactLn { coeff, base }.normalize()
    }

    /// `(1/2) ln(base)` — the ubiquitous half-log of a determinant or a
    /// squared distance.
    pub fn half_ln(base: Q) -> Self {
        Self::mul_ln(q(1, 2), base)
    }

    fn normalize(self) -> Self {
        if self.coeff.is_zero() || self.base.is_one() {
            ExactLn::zero()
        } else {
            self
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero() || self.base.is_one()
    }

    pub fn neg(&self) -> Self {
        ExactLn { coeff: -self.coeff.clone(), base: self.base.clone() }.normalize()
    }

    pub fn scale(&self, s: &Q) -> Self {
        ExactLn { coeff: self.coeff.clone() * s, base: self.base.clone() }.normalize()
    }

    pub fn add(&self, other: &ExactLn) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // c1 ln q1 + c2 ln q2 = (1/(b1 b2)) ln(q1^(a1 b2) q2^(a2 b1)).
        let (a1, b1) = (self.coeff.numer().clone(), self.coeff.denom().clone());
        let (a2, b2) = (other.coeff.numer().clone(), other.coeff.denom().clone());
        let e1 = &a1 * &b2;
        let e2 = &a2 * &b1;
        let base = crate::rational::pow_q_big(&self.base, &e1)
            * crate::rational::pow_q_big(&other.base, &e2);
        let coeff = Q::new(Z::one(), b1 * b2);
        ExactLn { coeff, base }.normalize()
    }

    pub fn sub(&self, other: &ExactLn) -> Self {
        self.add(&other.neg())
    }

    /// Sign of the value: -1, 0, or 1.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let s_coeff = if self.coeff.is_positive() { 1 } else { -1 };
        let s_ln = match self.base.cmp(&qi(1)) {
            Ordering::Greater => 1,
            Ordering::Equal => 0,
            Ordering::Less => -1,
        };
        s_coeff * s_ln
    }

    /// Exact order comparison by cross-powering:
    /// `c1 ln q1 <= c2 ln q2  <=>  q1^(a1 b2) <= q2^(a2 b1)`
    /// (multiplying by the positive `b1 b2` preserves order, and `ln` is
    /// monotone on positives).
    pub fn cmp_exact(&self, other: &ExactLn) -> Ordering {
        // Fast path via signs.
        let (s1, s2) = (self.signum(), other.signum());
        if s1 != s2 {
            return s1.cmp(&s2);
        }
        if s1 == 0 {
            return Ordering::Equal;
        }
        let (a1, b1) = (self.coeff.numer().clone(), self.coeff.denom().clone());
        let (a2, b2) = (other.coeff.numer().clone(), other.coeff.denom().clone());
        let lhs = crate::rational::pow_q_big(&self.base, &(&a1 * &b2));
        let rhs = crate::rational::pow_q_big(&other.base, &(&a2 * &b1));
        lhs.cmp(&rhs)
    }

    pub fn le(&self, other: &ExactLn) -> bool {
        self.cmp_exact(other) != Ordering::Greater
    }

    pub fn to_enc(&self, bits: u32) -> Enc {
        if self.is_zero() {
            return Enc::point(Q::zero());
        }
        ln_q(&self.base, bits + 2).scale(&self.coeff)
    }

    pub fn to_logvalue(&self, bits: u32) -> LogValue {
        LogValue::from_enc(&self.to_enc(bits))
    }
}

// ---------------------------------------------------------------------------
// Reporting type
// ---------------------------------------------------------------------------

/// A real number reported as `value` with a rigorous `abs_error` radius.
/// `value = -inf, abs_error = 0` represents minus infinity exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub value: f64,
    pub abs_error: f64,
}

impl LogValue {
    pub fn neg_infinity() -> Self {
        LogValue { value: f64::NEG_INFINITY, abs_error: 0.0 }
    }

    pub fn is_neg_infinity(&self) -> bool {
        self.value == f64::NEG_INFINITY
    }

    pub fn from_enc(e: &Enc) -> Self {
        let mid = e.mid();
        let value = q_to_f64(&mid);
        let half_width = q_to_f64(&e.width()) / 2.0;
        // Conservative slack for the final rounding of `mid` to f64.
        let abs_error = half_width * (1.0 + 1e-12) + value.abs() * 1e-15 + 1e-300;
        LogValue { value, abs_error }
    }

    pub fn exact_zero() -> Self {
        LogValue { value: 0.0, abs_error: 0.0 }
    }
}

impl Serialize for LogValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut m = s.serialize_map(Some(2))?;
        if self.is_neg_infinity() {
            m.serialize_entry("value", "-inf")?;
        } else {
            m.serialize_entry("value", &self.value)?;
        }
        m.serialize_entry("abs_error", &self.abs_error)?;
        m.end()
    }
}

impl<'de> Deserialize<'de> for LogValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            value: serde_json::Value,
            abs_error: f64,
        }
        let raw = Raw::deserialize(d)?;
        let value = match &raw.value {
            serde_json::Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| D::Error::custom("bad numeric value"))?,
            serde_json::Value::String(s) if s == "-inf" => f64::NEG_INFINITY,
            _ => return Err(D::Error::custom("value must be a number or \"-inf\"")),
        };
        Ok(LogValue { value, abs_error: raw.abs_error })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The enclosure endpoints are exact rationals; the f64 reference and
    /// the endpoint conversions can each be off by an ulp, so allow a sliver
    /// of double-precision slack.
    fn assert_contains(e: &Enc, x: f64) {
        let slack = 1e-13 * (1.0 + x.abs());
        assert!(
            q_to_f64(&e.lo) - slack <= x && x <= q_to_f64(&e.hi) + slack,
            "{x} not in [{}, {}]",
            q_to_f64(&e.lo),
            q_to_f64(&e.hi)
        );
    }

    #[test]
    fn ln_enclosures() {
        let bits = 128;
        assert_contains(&ln_q(&qi(2), bits), std::f64::consts::LN_2);
        assert_contains(&ln_q(&qi(3), bits), 3f64.ln());
        assert_contains(&ln_q(&q(1, 7), bits), (1f64 / 7.0).ln());
        assert_contains(&ln_q(&q(355, 113), bits), (355f64 / 113.0).ln());
        assert_eq!(ln_q(&qi(1), bits), Enc::point(Q::zero()));
        // Width within target.
        let e = ln_q(&qi(1000), 100);
        assert!(e.width() <= Q::new(Z::from(8), Z::one() << 100));
    }

    #[test]
    fn pi_and_friends() {
        assert_contains(pi_enc(), std::f64::consts::PI);
        assert_contains(&ln_pi(128), std::f64::consts::PI.ln());
        assert_contains(&pi_pow(2), std::f64::consts::PI * std::f64::consts::PI);
        assert_eq!(cmp_pi_pow_vs_q(1, &q(22, 7)), Ordering::Less);
        assert_eq!(cmp_pi_pow_vs_q(1, &q(314159, 100000)), Ordering::Greater);
        assert_eq!(cmp_pi_pow_vs_q(2, &qi(10)), Ordering::Less);
    }

    #[test]
    fn gamma_psi_ball() {
        let bits = 128;
        // Gamma(3) = 2 (r = 4): ln Gamma(4/2+1) = ln 2... Gamma(r/2+1) with
        // r=4 is Gamma(3) = 2.
        assert_contains(&ln_gamma_half_plus_one(4, bits), 2f64.ln());
        // r=1: Gamma(3/2) = sqrt(pi)/2.
        let g32 = (std::f64::consts::PI.sqrt() / 2.0).ln();
        assert_contains(&ln_gamma_half_plus_one(1, bits), g32);
        // psi(1) = 0 exactly.
        let p1 = psi_fn(1, bits);
        assert!(p1.lo <= Q::zero() && Q::zero() <= p1.hi);
        assert!(p1.width() < q(1, 1_000_000));
        // psi(2) = ln 2 - (1/2) ln pi ≈ 0.1207822...
        assert_contains(&psi_fn(2, bits), 0.12078223763524522);
        // v_2 = pi.
        assert_contains(&ln_ball_volume(2, bits), std::f64::consts::PI.ln());
        // v_3 = 4 pi / 3.
        assert_contains(
            &ln_ball_volume(3, bits),
            (4.0 * std::f64::consts::PI / 3.0).ln(),
        );
        // psi(r) < (1/2) ln r strictly for r > 1, equality at r = 1.
        assert_eq!(cmp_psi_vs_half_ln(1), Ordering::Equal);
        for r in 2..=12 {
            assert_eq!(cmp_psi_vs_half_ln(r), Ordering::Less, "r = {r}");
        }
        // psi increasing (interval-provable at this precision).
        for r in 1..=11u64 {
            let a = psi_fn(r, bits);
            let b = psi_fn(r + 1, bits);
            assert!(a.hi < b.lo, "psi({r}) !< psi({})", r + 1);
        }
    }

    #[test]
    fn exact_ln_algebra() {
        let a = ExactLn::half_ln(qi(4)); // ln 2
        let b = ExactLn::ln(qi(2));
        assert_eq!(a.cmp_exact(&b), Ordering::Equal);
        // (1/2) ln 4 + (1/2) ln 9 = ln 6
        let c = ExactLn::half_ln(qi(4)).add(&ExactLn::half_ln(qi(9)));
        assert_eq!(c.cmp_exact(&ExactLn::ln(qi(6))), Ordering::Equal);
        // ln(1/2) < 0 < ln 2, sign handling for negatives
        let neg = ExactLn::ln(q(1, 2));
        assert_eq!(neg.signum(), -1);
        assert_eq!(neg.cmp_exact(&ExactLn::zero()), Ordering::Less);
        assert_eq!(neg.cmp_exact(&b), Ordering::Less);
        assert_eq!(neg.cmp_exact(&b.neg()), Ordering::Equal);
        // -(1/4) ln 3 vs -(1/2) ln 2: compare 3^(-1/4) vs 2^(-1/2):
        // 3^2 = 9 > 2^4/... cross: (-1/4) ln 3 > (-1/2) ln 2 since
        // ln 3 / 4 < ln 2 / 2 <=> 3 < 4.
        let x = ExactLn::mul_ln(q(-1, 4), qi(3));
        let y = ExactLn::mul_ln(q(-1, 2), qi(2));
        assert_eq!(x.cmp_exact(&y), Ordering::Greater);
        // to_enc matches f64 expectations.
        let e = x.to_enc(96);
        assert_contains(&e, -(3f64.ln()) / 4.0);
        // scaling
        assert_eq!(
            a.scale(&qi(3)).cmp_exact(&ExactLn::ln(qi(8))),
            Ordering::Equal
        );
    }

    #[test]
    fn logvalue_serialization() {
        let lv = LogValue { value: 1.5, abs_error: 1e-30 };
        let s = serde_json::to_string(&lv).unwrap();
        assert_eq!(s, r#"{"value":1.5,"abs_error":1e-30}"#);
        let back: LogValue = serde_json::from_str(&s).unwrap();
        assert_eq!(back, lv);
        let ninf = LogValue::neg_infinity();
        let s2 = serde_json::to_string(&ninf).unwrap();
        assert_eq!(s2, r#"{"value":"-inf","abs_error":0.0}"#);
        let back2: LogValue = serde_json::from_str(&s2).unwrap();
        assert!(back2.is_neg_infinity());
    }

    #[test]
    fn precision_env_defaults() {
        // Not setting the variable in tests: default expected.
        assert!(precision_bits() >= 32);
        assert!(precision_bits() <= MAX_PRECISION_BITS);
    }
}
