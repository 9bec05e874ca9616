//! Exact lattice-point enumeration.
//!
//! Depth-first search over the LDL^T factorization of a positive-definite
//! Gram matrix, visiting integer coordinates level by level in nondecreasing
//! distance from the real center (the classic zig-zag order). All partial
//! quadratic forms are exact rationals, so accept/reject decisions at the
//! search frontier are never subject to rounding.
//!
//! Three drivers share the same engine:
//!
//! * [`closest_vectors`] — all lattice vectors closest to a rational target
//!   (the bound shrinks as better candidates appear; ties are all kept);
//! * [`shortest_vectors`] — all nonzero vectors of minimal norm;
//! * [`vectors_within`] — every vector with `Q(x - t) <= bound` for a fixed
//!   inclusive bound.
//!
//! Every driver counts search nodes against a budget and fails with
//! [`BudgetExceeded`] instead of running unbounded. A brute-force
//! coordinate-box oracle ([`brute_force_within`]) provides an independent
//! cross-check for small ranks in tests.

use crate::linalg::{gram_quad, QMat};
use crate::rational::{ceil_q, floor_q, isqrt_floor, round_q, Q, Z};
use num_traits::{Signed, Zero};
use thiserror::Error;

/// The node budget ran out before the search space was exhausted.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("enumeration budget exceeded after {nodes} nodes")]
pub struct BudgetExceeded {
    pub nodes: u64,
}

#[derive(Debug, Clone)]
pub struct EnumOpts {
    /// Maximum number of candidate evaluations across the whole search tree.
    pub budget: u64,
}

impl Default for EnumOpts {
    fn default() -> Self {
        EnumOpts { budget: 50_000_000 }
    }
}

impl EnumOpts {
    pub fn with_budget(budget: u64) -> Self {
        EnumOpts { budget }
    }
}

/// Result of a minimization search (closest or shortest vectors).
#[derive(Debug, Clone)]
pub struct CvpResult {
    /// Minimal value of the quadratic form (squared distance / squared norm).
    pub min_norm: Q,
    /// Every coordinate vector attaining it, sorted lexicographically.
    pub minimizers: Vec<Vec<Z>>,
    pub nodes: u64,
}

/// Result of a fixed-radius search.
#[derive(Debug, Clone)]
pub struct WithinResult {
    /// `(coordinates, norm)` pairs with `norm <= bound`, sorted by norm and
    /// then lexicographically.
    pub points: Vec<(Vec<Z>, Q)>,
    pub nodes: u64,
}

#[derive(PartialEq)]
enum Mode {
    /// Shrink the bound to the best value seen; keep all minimizers.
    Shrink,
    /// Keep the bound fixed; collect everything at or under it.
    Fixed,
}

struct Enumerator<'a> {
    l: &'a QMat,
    d: &'a [Q],
    t: &'a [Q],
    bound: Q,
    mode: Mode,
    exclude_zero: bool,
    found: Vec<(Vec<Z>, Q)>,
    nodes: u64,
    budget: u64,
}

/// Center of level `i` given the already-fixed coordinates `x[j]`, `j > i`:
/// `c_i = t_i - sum_{j>i} L[j][i] (x_j - t_j)`.
fn center_of(l: &QMat, t: &[Q], x: &[Z], i: usize) -> Q {
    let n = t.len();
    let mut c = t[i].clone();
    for j in (i + 1)..n {
        let lji = l.at(j, i);
        if lji.is_zero() {
            continue;
        }
        c -= lji.clone() * (Q::from_integer(x[j].clone()) - t[j].clone());
    }
    c
}

impl<'a> Enumerator<'a> {
    fn go(&mut self, i: usize, partial: &Q, x: &mut Vec<Z>) -> Result<(), BudgetExceeded> {
        let c = center_of(self.l, self.t, x, i);
        let r = round_q(&c);
        let mut lo: Z = r.clone() - 1;
        let mut hi: Z = r.clone() + 1;
        let mut first = Some(r);
        loop {
            let xi = match first.take() {
                Some(v) => v,
                None => {
                    // Pick whichever side is closer to the center so the
                    // candidate distances are nondecreasing.
                    let dlo = c.clone() - Q::from_integer(lo.clone());
                    let dhi = Q::from_integer(hi.clone()) - c.clone();
                    if dlo <= dhi {
                        let v = lo.clone();
                        lo -= 1;
                        v
                    } else {
                        let v = hi.clone();
                        hi += 1;
                        v
                    }
                }
            };
            self.nodes += 1;
            if self.nodes > self.budget {
                return Err(BudgetExceeded { nodes: self.nodes });
            }
            let w = Q::from_integer(xi.clone()) - c.clone();
            let s = partial.clone() + self.d[i].clone() * w.clone() * w;
            if s > self.bound {
                // Candidates are visited in nondecreasing distance, so every
                // remaining one at this level overshoots as well.
                break;
            }
            x[i] = xi;
            if i == 0 {
                self.record(x, s);
            } else {
                self.go(i - 1, &s, x)?;
            }
        }
        Ok(())
    }

    fn record(&mut self, x: &[Z], norm: Q) {
        if self.exclude_zero && x.iter().all(Zero::is_zero) {
            return;
        }
        match self.mode {
            Mode::Fixed => self.found.push((x.to_vec(), norm)),
            Mode::Shrink => {
                if self.found.is_empty() || norm < self.bound {
                    self.bound = norm.clone();
                    self.found.clear();
                    self.found.push((x.to_vec(), norm));
                } else if norm == self.bound {
                    self.found.push((x.to_vec(), norm));
                }
            }
        }
    }
}

fn factor(gram: &QMat) -> (QMat, Vec<Q>) {
    assert_eq!(gram.nrows(), gram.ncols(), "Gram matrix must be square");
    match gram.ldlt() {
        Ok(f) => (f.l, f.d),
        Err(p) => panic!("Gram matrix is not positive definite (pivot {p})"),
    }
}

/// Nearest-plane rounding: a lattice point near `t` and its exact squared
/// distance, used as the inclusive initial bound for closest-vector search.
pub fn babai_nearest(gram: &QMat, target: &[Q]) -> (Vec<Z>, Q) {
    let n = gram.nrows();
    assert_eq!(n, target.len());
    let (l, d) = factor(gram);
    let mut x = vec![Z::zero(); n];
    let mut total = Q::zero();
    for i in (0..n).rev() {
        let c = center_of(&l, target, &x, i);
        x[i] = round_q(&c);
        let w = Q::from_integer(x[i].clone()) - c;
        total += d[i].clone() * w.clone() * w;
    }
    (x, total)
}

/// All lattice vectors (in basis coordinates) closest to the rational target,
/// with their common squared distance.
pub fn closest_vectors(
    gram: &QMat,
    target: &[Q],
    opts: &EnumOpts,
) -> Result<CvpResult, BudgetExceeded> {
    let n = gram.nrows();
    assert_eq!(n, target.len());
    if n == 0 {
        return Ok(CvpResult {
            min_norm: Q::zero(),
            minimizers: vec![vec![]],
            nodes: 0,
        });
    }
    let (l, d) = factor(gram);
    let (_, babai_norm) = babai_nearest(gram, target);
    let mut e = Enumerator {
        l: &l,
        d: &d,
        t: target,
        bound: babai_norm,
        mode: Mode::Shrink,
        exclude_zero: false,
        found: Vec::new(),
        nodes: 0,
        budget: opts.budget,
    };
    let mut x = vec![Z::zero(); n];
    e.go(n - 1, &Q::zero(), &mut x)?;
    let mut minimizers: Vec<Vec<Z>> = e.found.into_iter().map(|(v, _)| v).collect();
    minimizers.sort();
    Ok(CvpResult {
        min_norm: e.bound,
        minimizers,
        nodes: e.nodes,
    })
}

/// Squared distance from a rational point to the lattice.
pub fn dist2_to_lattice(gram: &QMat, target: &[Q], opts: &EnumOpts) -> Result<Q, BudgetExceeded> {
    Ok(closest_vectors(gram, target, opts)?.min_norm)
}

/// All nonzero vectors of minimal norm, with that norm (the squared first
/// minimum). The count is the kissing number.
pub fn shortest_vectors(gram: &QMat, opts: &EnumOpts) -> Result<CvpResult, BudgetExceeded> {
    let n = gram.nrows();
    assert!(n >= 1, "shortest vector of a rank-0 lattice is undefined");
    let (l, d) = factor(gram);
    // A basis vector gives an inclusive starting bound.
    let init = (0..n).map(|i| gram.at(i, i).clone()).min().unwrap();
    let zeros = vec![Q::zero(); n];
    let mut e = Enumerator {
        l: &l,
        d: &d,
        t: &zeros,
        bound: init,
        mode: Mode::Shrink,
        exclude_zero: true,
        found: Vec::new(),
        nodes: 0,
        budget: opts.budget,
    };
    let mut x = vec![Z::zero(); n];
    e.go(n - 1, &Q::zero(), &mut x)?;
    let mut minimizers: Vec<Vec<Z>> = e.found.into_iter().map(|(v, _)| v).collect();
    minimizers.sort();
    Ok(CvpResult {
        min_norm: e.bound,
        minimizers,
        nodes: e.nodes,
    })
}

/// Squared first minimum.
pub fn lambda1_sq(gram: &QMat, opts: &EnumOpts) -> Result<Q, BudgetExceeded> {
    Ok(shortest_vectors(gram, opts)?.min_norm)
}

/// Every lattice vector with `Q(x - target) <= bound` (inclusive).
pub fn vectors_within(
    gram: &QMat,
    target: &[Q],
    bound: &Q,
    opts: &EnumOpts,
) -> Result<WithinResult, BudgetExceeded> {
    let n = gram.nrows();
    assert_eq!(n, target.len());
    if bound.is_negative() {
        return Ok(WithinResult { points: Vec::new(), nodes: 0 });
    }
    if n == 0 {
        return Ok(WithinResult {
            points: vec![(vec![], Q::zero())],
            nodes: 0,
        });
    }
    let (l, d) = factor(gram);
    let mut e = Enumerator {
        l: &l,
        d: &d,
        t: target,
        bound: bound.clone(),
        mode: Mode::Fixed,
        exclude_zero: false,
        found: Vec::new(),
        nodes: 0,
        budget: opts.budget,
    };
    let mut x = vec![Z::zero(); n];
    e.go(n - 1, &Q::zero(), &mut x)?;
    let mut points = e.found;
    points.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    Ok(WithinResult { points, nodes: e.nodes })
}

/// Rational upper bound for `sqrt(p/q)` with `p/q >= 0`.
fn sqrt_upper(x: &Q) -> Q {
    assert!(!x.is_negative());
    let p = x.numer().clone();
    let qd = x.denom().clone();
    // sqrt(p/q) = sqrt(p q)/q <= (floor(sqrt(p q)) + 1)/q.
    Q::new(isqrt_floor(&(p * &qd)) + 1, qd)
}

/// Independent oracle: enumerate the full coordinate box that must contain
/// every solution (`|x_i - t_i|^2 <= bound * (G^{-1})_{ii}`) and filter by
/// the exact quadratic form. Exponential in the rank; for cross-checks on
/// small instances only.
pub fn brute_force_within(gram: &QMat, target: &[Q], bound: &Q) -> Vec<(Vec<Z>, Q)> {
    let n = gram.nrows();
    assert_eq!(n, target.len());
    if bound.is_negative() {
        return Vec::new();
    }
    if n == 0 {
        return vec![(vec![], Q::zero())];
    }
    let inv = gram
        .inverse()
        .expect("Gram matrix must be invertible for the box oracle");
    let mut ranges: Vec<(Z, Z)> = Vec::with_capacity(n);
    for i in 0..n {
        let s = sqrt_upper(&(bound.clone() * inv.at(i, i).clone()));
        let lo = ceil_q(&(target[i].clone() - s.clone()));
        let hi = floor_q(&(target[i].clone() + s));
        ranges.push((lo, hi));
    }
    let mut out = Vec::new();
    let mut x = vec![Z::zero(); n];
    fn walk(
        gram: &QMat,
        target: &[Q],
        bound: &Q,
        ranges: &[(Z, Z)],
        i: usize,
        x: &mut Vec<Z>,
        out: &mut Vec<(Vec<Z>, Q)>,
    ) {
        if i == ranges.len() {
            let diff: Vec<Q> = x
                .iter()
                .zip(target)
                .map(|(xi, ti)| Q::from_integer(xi.clone()) - ti.clone())
                .collect();
            let norm = gram_quad(gram, &diff);
            if norm <= *bound {
                out.push((x.clone(), norm));
            }
            return;
        }
        let (lo, hi) = &ranges[i];
        let mut v = lo.clone();
        while v <= *hi {
            x[i] = v.clone();
            walk(gram, target, bound, ranges, i + 1, x, out);
            v += 1;
        }
    }
    walk(gram, target, bound, &ranges, 0, &mut x, &mut out);
    out.sort_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::QMat;
    use crate::rational::{q, qi, zi};

    fn opts() -> EnumOpts {
        EnumOpts::default()
    }

    #[test]
    fn shortest_identity() {
        let g = QMat::identity(2);
        let r = shortest_vectors(&g, &opts()).unwrap();
        assert_eq!(r.min_norm, qi(1));
        assert_eq!(r.minimizers.len(), 4);
    }

    #[test]
    fn shortest_hexagonal() {
        let g = QMat::from_int_rows(&[&[2, -1], &[-1, 2]]);
        let r = shortest_vectors(&g, &opts()).unwrap();
        assert_eq!(r.min_norm, qi(2));
        assert_eq!(r.minimizers.len(), 6);
    }

    #[test]
    fn shortest_d4_kissing_number() {
        // Root-basis Gram of the checkerboard lattice in rank 4:
        // determinant 4, minimum 2, kissing number 24.
        let g = QMat::from_int_rows(&[
            &[2, -1, 0, 0],
            &[-1, 2, -1, -1],
            &[0, -1, 2, 0],
            &[0, -1, 0, 2],
        ]);
        assert_eq!(g.det(), qi(4));
        let r = shortest_vectors(&g, &opts()).unwrap();
        assert_eq!(r.min_norm, qi(2));
        assert_eq!(r.minimizers.len(), 24);
    }

    #[test]
    fn closest_simple() {
        let g = QMat::identity(2);
        let t = [q(2, 5), q(1, 2)];
        let r = closest_vectors(&g, &t, &opts()).unwrap();
        // Ties in the second coordinate: (0,0) and (0,1).
        assert_eq!(r.min_norm, q(4, 25) + q(1, 4));
        assert_eq!(r.minimizers.len(), 2);
        assert_eq!(r.minimizers[0], vec![zi(0), zi(0)]);
        assert_eq!(r.minimizers[1], vec![zi(0), zi(1)]);
    }

    #[test]
    fn closest_matches_babai_bound() {
        let g = QMat::from_int_rows(&[&[3, 1], &[1, 2]]);
        let t = [q(7, 3), q(-5, 7)];
        let (_, babai_norm) = babai_nearest(&g, &t);
        let r = closest_vectors(&g, &t, &opts()).unwrap();
        assert!(r.min_norm <= babai_norm);
    }

    #[test]
    fn within_identity() {
        let g = QMat::identity(2);
        let t = [qi(0), qi(0)];
        let r = vectors_within(&g, &t, &qi(1), &opts()).unwrap();
        // 0, and the four unit vectors.
        assert_eq!(r.points.len(), 5);
        assert_eq!(r.points[0].0, vec![zi(0), zi(0)]);
        assert_eq!(r.points[0].1, qi(0));
        let r2 = vectors_within(&g, &t, &qi(2), &opts()).unwrap();
        assert_eq!(r2.points.len(), 9);
    }

    #[test]
    fn within_negative_bound_is_empty() {
        let g = QMat::identity(2);
        let t = [qi(0), qi(0)];
        let r = vectors_within(&g, &t, &qi(-1), &opts()).unwrap();
        assert!(r.points.is_empty());
    }

    #[test]
    fn budget_is_enforced() {
        let g = QMat::identity(4);
        let t = [qi(0), qi(0), qi(0), qi(0)];
        let err = vectors_within(&g, &t, &qi(100), &EnumOpts::with_budget(10));
        assert!(matches!(err, Err(BudgetExceeded { .. })));
    }

    #[test]
    fn agrees_with_box_oracle() {
        let grams = [
            QMat::from_int_rows(&[&[2, -1, 0], &[-1, 2, -1], &[0, -1, 2]]),
            QMat::from_int_rows(&[&[5, 2, 1], &[2, 4, 0], &[1, 0, 3]]),
            QMat::from_int_rows(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]]),
        ];
        let targets = [
            [q(1, 3), q(-2, 5), q(7, 2)],
            [q(0, 1), q(1, 2), q(1, 2)],
            [q(-3, 7), q(22, 9), q(1, 1)],
        ];
        for g in &grams {
            for t in &targets {
                let bound = qi(3);
                let fast = vectors_within(g, t, &bound, &opts()).unwrap();
                let slow = brute_force_within(g, t, &bound);
                assert_eq!(fast.points, slow, "gram {g:?} target {t:?}");
                let cv = closest_vectors(g, t, &opts()).unwrap();
                if let Some((_, best)) = slow.first() {
                    assert_eq!(cv.min_norm, *best);
                }
                let all_min: Vec<Vec<Z>> = slow
                    .iter()
                    .filter(|(_, n)| n == &cv.min_norm)
                    .map(|(v, _)| v.clone())
                    .collect();
                assert_eq!(cv.minimizers, all_min);
            }
        }
    }

    #[test]
    fn rank_zero_conventions() {
        let g = QMat::zeros(0, 0);
        let r = closest_vectors(&g, &[], &opts()).unwrap();
        assert_eq!(r.min_norm, qi(0));
        assert_eq!(r.minimizers, vec![Vec::<Z>::new()]);
        let w = vectors_within(&g, &[], &qi(0), &opts()).unwrap();
        assert_eq!(w.points.len(), 1);
    }
}
