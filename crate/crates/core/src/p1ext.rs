//! The family of rank-two extensions indexed by rational points of the
//! projective line: heights, the circle map to `R/Z`, exact sizes with
//! their two-sided height bounds, Ford-circle tangency, the modular-group
//! compatibility square, and the general wedge formula for sizes of
//! rank-one quotients.

use crate::enclosure::{ExactLn, LogValue};
use crate::enumerate::{self, BudgetExceeded, EnumOpts};
use crate::lattice::{EuclideanLattice, LatticeError};
use crate::linalg::ZMat;
use crate::rational::{Q, Z};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum P1Error {
    #[error("projective coordinates must not both be zero")]
    BothZero,
    #[error("the covector is not surjective (entries have a common factor)")]
    NotSurjective,
    #[error("matrix must be integral with determinant 1")]
    NotUnimodular,
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<BudgetExceeded> for P1Error {
    fn from(e: BudgetExceeded) -> Self {
        P1Error::Lattice(LatticeError::from(e))
    }
}

/// A point of the projective line with coprime integer coordinates,
/// sign-normalized so `a0 > 0`, or `a0 = 0` and `a1 = 1`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProjPoint {
    a0: Z,
    a1: Z,
}

/// Distance from a rational number to the nearest integer.
pub fn dist_to_z(x: &Q) -> Q {
    let frac = x - x.floor();
    let other = Q::one() - frac.clone();
    frac.min(other)
}

/// Bezout coefficients `(x, y)` with `a x + b y = 1` for coprime `a, b`.
fn bezout(a: &Z, b: &Z) -> (Z, Z) {
    let e = a.extended_gcd(b);
    debug_assert!(e.gcd.is_one());
    (e.x, e.y)
}

impl ProjPoint {
    pub fn new(a0: Z, a1: Z) -> Result<ProjPoint, P1Error> {
        if a0.is_zero() && a1.is_zero() {
            return Err(P1Error::BothZero);
        }
        let g = a0.gcd(&a1);
        let mut a0 = a0 / &g;
        let mut a1 = a1 / &g;
        let flip = a0.is_negative() || (a0.is_zero() && a1.is_negative());
        if flip {
            a0 = -a0;
            a1 = -a1;
        }
        Ok(ProjPoint { a0, a1 })
    }

    pub fn from_i64(a0: i64, a1: i64) -> Result<ProjPoint, P1Error> {
        ProjPoint::new(Z::from(a0), Z::from(a1))
    }

    pub fn a0(&self) -> &Z {
        &self.a0
    }

    pub fn a1(&self) -> &Z {
        &self.a1
    }

    /// `a0^2 + a1^2`, the exponential of twice the height.
    pub fn norm_sq(&self) -> Z {
        &self.a0 * &self.a0 + &self.a1 * &self.a1
    }

    /// The two split points `(1:0)` and `(0:1)`.
    pub fn is_split(&self) -> bool {
        self.a0.is_zero() || self.a1.is_zero()
    }

    /// Height `1/2 log(a0^2 + a1^2)`.
    pub fn height_exact(&self) -> ExactLn {
        ExactLn::half_ln(Q::from_integer(self.norm_sq()))
    }

    pub fn height(&self) -> LogValue {
        self.height_exact()
            .to_logvalue(crate::enclosure::precision_bits())
    }

    /// The class of the extension parameter in `R/Z`, canonical
    /// representative in `[0, 1)`: `(m0 a1 - m1 a0) / (a0^2 + a1^2)` for
    /// any Bezout pair `a0 m0 + a1 m1 = 1`.
    pub fn s_class(&self) -> Q {
        let (m0, m1) = bezout(&self.a0, &self.a1);
        let raw = Q::new(&m0 * &self.a1 - &m1 * &self.a0, self.norm_sq());
        let r = raw.clone() - raw.floor();
        debug_assert!(!r.is_negative() && r < Q::one());
        r
    }

    /// Exact size `log dist(s(P), Z) + 2 height(P)`, folded into a single
    /// exact logarithm; `None` encodes negative infinity (the two split
    /// points).
    pub fn size_exact(&self) -> Option<ExactLn> {
        let d = dist_to_z(&self.s_class());
        if d.is_zero() {
            return None;
        }
        Some(ExactLn::ln(d * Q::from_integer(self.norm_sq())))
    }

    pub fn size(&self) -> LogValue {
        match self.size_exact() {
            None => LogValue::neg_infinity(),
            Some(s) => s.to_logvalue(crate::enclosure::precision_bits()),
        }
    }

    /// Exact lower bound `-1/2 log 2 + height`.
    pub fn size_lower_bound(&self) -> ExactLn {
        ExactLn::half_ln(Q::new(self.norm_sq(), Z::from(2)))
    }

    /// Exact upper bound `-log 2 + 2 height`.
    pub fn size_upper_bound(&self) -> ExactLn {
        ExactLn::ln(Q::new(self.norm_sq(), Z::from(2)))
    }
}

/// A circle of the Ford configuration: the circle of radius `1/(2a^2)`
/// tangent to the real line at `b/a`, or the horizontal line at height 1
/// (the circle "at infinity").
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CircleQ {
    Finite { a: Z, b: Z },
    Infinity,
}

impl CircleQ {
    pub fn from_rational(x: &Q) -> CircleQ {
        CircleQ::Finite {
            a: x.denom().clone(),
            b: x.numer().clone(),
        }
    }

    pub fn infinity() -> CircleQ {
        CircleQ::Infinity
    }

    /// The `(a, b)` pair; the line at infinity is `(0, 1)`.
    pub fn pair(&self) -> (Z, Z) {
        match self {
            CircleQ::Finite { a, b } => (a.clone(), b.clone()),
            CircleQ::Infinity => (Z::zero(), Z::one()),
        }
    }

    /// Center and radius; `None` for the line at infinity.
    pub fn center_radius(&self) -> Option<((Q, Q), Q)> {
        match self {
            CircleQ::Finite { a, b } => {
                let r = Q::new(Z::one(), Z::from(2) * a * a);
                Some(((Q::new(b.clone(), a.clone()), r.clone()), r))
            }
            CircleQ::Infinity => None,
        }
    }
}

/// Abscissa of the tangency point of two Ford circles, or `None` when
/// they are disjoint. Two distinct circles are externally tangent exactly
/// when `|a0 b1 - a1 b0| = 1`, and then touch above
/// `(a0 b0 + a1 b1) / (a0^2 + a1^2)`.
pub fn ford_tangency(c0: &CircleQ, c1: &CircleQ) -> Option<Q> {
    assert_ne!(c0, c1, "tangency requires two distinct circles");
    let (a0, b0) = c0.pair();
    let (a1, b1) = c1.pair();
    let det = &a0 * &b1 - &a1 * &b0;
    if !det.abs().is_one() {
        return None;
    }
    Some(Q::new(&a0 * &b0 + &a1 * &b1, &a0 * &a0 + &a1 * &a1))
}

/// Verify the compatibility square of the modular group: for an integer
/// matrix `gamma = [[a, b], [c, d]]` of determinant 1, the class
/// `s((c : a))` agrees mod 1 with the real part of `gamma^{-1} i`, which
/// is the rational number `-(ab + cd) / (a^2 + c^2)`.
pub fn sgroup_check(gamma: &ZMat) -> Result<bool, P1Error> {
    assert_eq!((gamma.nrows(), gamma.ncols()), (2, 2));
    if !gamma.det().is_one() {
        return Err(P1Error::NotUnimodular);
    }
    let (a, b) = (gamma.at(0, 0).clone(), gamma.at(0, 1).clone());
    let (c, d) = (gamma.at(1, 0).clone(), gamma.at(1, 1).clone());
    let p = ProjPoint::new(c.clone(), a.clone())?;
    let re = Q::new(-(&a * &b + &c * &d), &a * &a + &c * &c);
    Ok((p.s_class() - re).is_integer())
}

/// Exact squared wedge norm `min{ |m ^ dual(a)|^2 : a(m) = 1 }` over the
/// affine fiber, computed by a closest-vector search in the kernel of the
/// covector. Zero signals the split case.
pub fn wedge_size_sq(
    e: &EuclideanLattice,
    a: &[Z],
    opts: &EnumOpts,
) -> Result<Q, P1Error> {
    let n = e.rank();
    assert_eq!(a.len(), n);
    let g = a.iter().fold(Z::zero(), |acc, x| acc.gcd(x));
    if !g.is_one() {
        return Err(P1Error::NotSurjective);
    }
    // A particular integer solution of a(m) = 1 by folding Bezout pairs:
    // maintain acc = gcd(a_0..a_i) and coefficients with a . m0 = acc.
    let mut m0 = vec![Z::zero(); n];
    let mut acc = Z::zero();
    for (i, ai) in a.iter().enumerate() {
        if ai.is_zero() {
            continue;
        }
        let eg = acc.extended_gcd(ai);
        for c in m0.iter_mut().take(i) {
            *c *= &eg.x;
        }
        m0[i] = eg.y;
        acc = eg.gcd;
    }
    debug_assert!(acc.is_one());
    debug_assert!(
        a.iter().zip(&m0).map(|(x, y)| x * y).sum::<Z>().is_one(),
        "particular solution must satisfy a(m) = 1"
    );
    // Squared norm of the Gram-dual of the covector: a^T G^{-1} a.
    let ginv = e.gram().inverse().expect("positive-definite");
    let aq: Vec<Q> = a.iter().map(|x| Q::from_integer(x.clone())).collect();
    let atilde = ginv.mul_vec(&aq);
    let atilde_sq: Q = aq.iter().zip(&atilde).map(|(x, y)| x.clone() * y.clone()).sum();
    // Minimize |m|^2 over the fiber m0 + ker(a).
    let min_m_sq = if n == 1 {
        // The fiber is a single point.
        e.norm_sq(&m0)
    } else {
        let amat = {
            let mut r = ZMat::zeros(1, n);
            for (j, x) in a.iter().enumerate() {
                r.set(0, j, x.clone());
            }
            r
        };
        let kernel = amat.right_kernel();
        let gram_k = e.gram().pullback(&kernel.to_qmat());
        let m0q: Vec<Q> = m0.iter().map(|x| Q::from_integer(x.clone())).collect();
        let gm0 = e.gram().mul_vec(&m0q);
        // rhs_j = <kernel column j, m0>_E ; the unconstrained optimum is -c.
        let rhs: Vec<Q> = (0..kernel.ncols())
            .map(|jcol| {
                (0..n)
                    .map(|r| Q::from_integer(kernel.at(r, jcol).clone()) * gm0[r].clone())
                    .sum()
            })
            .collect();
        let c = gram_k
            .solve_vec(&rhs)
            .expect("kernel Gram is positive-definite");
        let target: Vec<Q> = c.iter().map(|x| -x.clone()).collect();
        let dist = enumerate::dist2_to_lattice(&gram_k, &target, opts)?;
        let c_quad = crate::linalg::gram_quad(&gram_k, &target);
        dist + e.norm_sq(&m0) - c_quad
    };
    Ok(atilde_sq * min_m_sq - Q::one())
}

/// Size of the rank-one-quotient extension attached to a surjective
/// covector: `1/2 log` of the squared wedge minimum; negative infinity
/// when the extension splits.
pub fn wedge_size(
    e: &EuclideanLattice,
    a: &[Z],
    opts: &EnumOpts,
) -> Result<LogValue, P1Error> {
    let w = wedge_size_sq(e, a, opts)?;
    if w.is_zero() {
        return Ok(LogValue::neg_infinity());
    }
    Ok(ExactLn::half_ln(w).to_logvalue(crate::enclosure::precision_bits()))
}
