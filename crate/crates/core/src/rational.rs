//! Exact rational scalars: aliases, constructors, parsing and formatting.
//!
//! Rationals serialize as strings `"p/q"` in lowest terms (`"p"` when the
//! denominator is one) so that JSON output is exact and byte-stable.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Arbitrary-precision integer.
pub type Z = BigInt;
/// Arbitrary-precision rational.
pub type Q = BigRational;

/// Integer constant as `Z`.
pub fn zi(n: i64) -> Z {
    Z::from(n)
}

/// Integer constant as `Q`.
pub fn qi(n: i64) -> Q {
    Q::from_integer(Z::from(n))
}

/// Rational constant `n/d`.
///
/// Panics if `d == 0`.
pub fn q(n: i64, d: i64) -> Q {
    Q::new(Z::from(n), Z::from(d))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseRationalError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid integer part in rational literal: {0:?}")]
    BadInteger(String),
    #[error("zero denominator in rational literal")]
    ZeroDenominator,
    #[error("too many '/' separators in rational literal")]
    TooManySlashes,
}

/// Parses `"p"` or `"p/q"` (optional sign on `p`; `q` positive or negative).
pub fn parse_q(s: &str) -> Result<Q, ParseRationalError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(ParseRationalError::Empty);
    }
    let parts: Vec<&str> = s.split('/').collect();
    match parts.len() {
        1 => {
            let n: Z = parts[0]
                .parse()
                .map_err(|_| ParseRationalError::BadInteger(parts[0].to_string()))?;
            Ok(Q::from_integer(n))
        }
        2 => {
            let n: Z = parts[0]
                .parse()
                .map_err(|_| ParseRationalError::BadInteger(parts[0].to_string()))?;
            let d: Z = parts[1]
                .parse()
                .map_err(|_| ParseRationalError::BadInteger(parts[1].to_string()))?;
            if d.is_zero() {
                return Err(ParseRationalError::ZeroDenominator);
            }
            Ok(Q::new(n, d))
        }
        _ => Err(ParseRationalError::TooManySlashes),
    }
}

/// Formats a rational as `"p/q"` in lowest terms, or `"p"` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Largest integer `<= x`.
pub fn floor_q(x: &Q) -> Z {
    x.floor().to_integer()
}

/// Smallest integer `>= x`.
pub fn ceil_q(x: &Q) -> Z {
    x.ceil().to_integer()
}

/// Integer nearest to `x` (ties away from zero — any fixed rule works for
/// the enumeration code, which only needs *some* starting integer).
pub fn round_q(x: &Q) -> Z {
    x.round().to_integer()
}

/// Fractional part normalized to `[0, 1)`.
pub fn frac_mod1(x: &Q) -> Q {
    x - Q::from_integer(floor_q(x))
}

/// Distance from `x` to the nearest integer, in `[0, 1/2]`.
pub fn dist_to_z(x: &Q) -> Q {
    let f = frac_mod1(x);
    let c = qi(1) - f.clone();
    if f <= c {
        f
    } else {
        c
    }
}

/// Exact integer power with `i64` exponent (negative allowed; `x != 0` then).
pub fn pow_q(x: &Q, e: i64) -> Q {
    if e == 0 {
        return qi(1);
    }
    let mut base = if e < 0 {
        assert!(!x.is_zero(), "zero to a negative power");
        x.recip()
    } else {
        x.clone()
    };
    let mut n = e.unsigned_abs();
    let mut acc = qi(1);
    while n > 0 {
        if n & 1 == 1 {
            acc *= base.clone();
        }
        base = base.clone() * base;
        n >>= 1;
    }
    acc
}

/// Exact integer power with a `Z` exponent that must fit in `i64`.
pub fn pow_q_big(x: &Q, e: &Z) -> Q {
    let e64 = e
        .to_i64()
        .expect("exponent too large for exact rational power");
    pow_q(x, e64)
}

/// Conversion to `f64`, saturating on overflow (values here are desk-scale).
pub fn q_to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `|x|`.
pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

/// Sum of a slice of rationals.
pub fn sum_q<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Q {
    let mut acc = Q::zero();
    for x in xs {
        acc += x;
    }
    acc
}

/// Integer square root, rounded down. Panics on negative input.
pub fn isqrt_floor(n: &Z) -> Z {
    assert!(!n.is_negative(), "isqrt of negative integer");
    n.sqrt()
}

/// Floor of the `n`-th root of a nonnegative integer.
pub fn nth_root_floor(x: &Z, n: u32) -> Z {
    assert!(n >= 1);
    assert!(!x.is_negative(), "root of negative integer");
    num_integer::Roots::nth_root(x, n)
}

/// Ceiling of the `n`-th root of a nonnegative integer.
pub fn nth_root_ceil(x: &Z, n: u32) -> Z {
    let r = nth_root_floor(x, n);
    if num_traits::Pow::pow(&r, n) == *x {
        r
    } else {
        r + 1
    }
}

/// A rational upper bound for `x^(1/n)` with `x >= 0`:
/// `(a/b)^(1/n) = (a b^(n-1))^(1/n) / b <= (ceil_root(a b^(n-1), n)) / b`.
pub fn rational_root_upper(x: &Q, n: u32) -> Q {
    assert!(n >= 1);
    assert!(!x.is_negative());
    let a = x.numer().clone();
    let b = x.denom().clone();
    let scaled = a * num_traits::Pow::pow(&b, n - 1);
    Q::new(nth_root_ceil(&scaled, n), b)
}
