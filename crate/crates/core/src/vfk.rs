//! Lattices of Voronoi's first kind: Selling parameters, obtuse-superbase
//! search, and closed-form Voronoi-cell combinatorics.
//!
//! A superbase of a rank-`n` lattice is a tuple `(v_0, ..., v_n)` with
//! `v_1..v_n` a basis and `v_0 + ... + v_n = 0`. Its Selling parameters are
//! `p_ij = -<v_i, v_j>` for `i < j`; the superbase is obtuse when all
//! `p_ij >= 0`. In that case the squared norm is the weighted cut form
//! `|sum x_i v_i|^2 = sum_{i<j} p_ij (x_i - x_j)^2`, the Voronoi cell has
//! one facet per nonempty proper subset `S` of `{0..n}` (vector
//! `v_S = sum_{i in S} v_i`), and for strictly positive `p` the vertices
//! are in bijection with the `(n+1)!` maximal chains of subsets.
//!
//! The obtuse-superbase search runs the classical sign flip: pick the most
//! negative `p_ab`, negate `v_a`, and redistribute `2 v_a` onto partners.
//! For rank <= 3 each flip strictly decreases `sum p_ij` (which lives in a
//! discrete bounded-below set), so the search provably terminates in an
//! obtuse superbase; for rank >= 4 the redistribution step is a heuristic
//! going beyond the rank-3 move (no monotonicity guarantee — some lattices
//! have no obtuse superbase at all), so the search is capped and reports
//! its best progress on failure.

use crate::lattice::EuclideanLattice;
use crate::linalg::{gram_pair, gram_quad, QMat, ZMat};
use crate::rational::{Q, Z};
use itertools::Itertools;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VfkError {
    #[error("operation requires positive rank")]
    ZeroRank,
    #[error("Selling parameters must be nonnegative, got p_{i},{j} < 0")]
    NegativeParameter { i: usize, j: usize },
    #[error("Selling parameter map must contain exactly the pairs 0 <= i < j <= n")]
    BadParameterSupport,
    #[error("Selling parameters define a degenerate (non positive definite) form")]
    Degenerate,
    #[error("no obtuse superbase found after {iterations} flips (best N reached: {best_n})")]
    NotFound { iterations: usize, best_n: Q },
    #[error("chain facet system is singular")]
    Singular,
    #[error("closed-form vertex enumeration requires strictly positive Selling parameters")]
    NotStrictlyObtuse,
    #[error("subset family is not a chain of nonempty proper subsets")]
    NotAChain,
}

/// Nonnegative Selling parameters `p_ij`, `0 <= i < j <= n`, for a rank-`n`
/// lattice presented by a superbase.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SellingParams {
    n: usize,
    p: BTreeMap<(usize, usize), Q>,
}

/// All index pairs `0 <= i < j <= n` in lexicographic order.
pub fn index_pairs(n: usize) -> Vec<(usize, usize)> {
    (0..=n)
        .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
        .collect()
}

impl SellingParams {
    pub fn new(n: usize, p: BTreeMap<(usize, usize), Q>) -> Result<Self, VfkError> {
        if n == 0 {
            return Err(VfkError::ZeroRank);
        }
        let expected = index_pairs(n);
        if p.len() != expected.len() || !expected.iter().all(|k| p.contains_key(k)) {
            return Err(VfkError::BadParameterSupport);
        }
        for (&(i, j), v) in &p {
            if v.is_negative() {
                return Err(VfkError::NegativeParameter { i, j });
            }
        }
        Ok(SellingParams { n, p })
    }

    /// Parameters from a slice in pair order `(0,1), (0,2), ..., (n-1,n)`.
    pub fn from_slice(n: usize, vals: &[Q]) -> Result<Self, VfkError> {
        let pairs = index_pairs(n);
        assert_eq!(vals.len(), pairs.len(), "expected one value per index pair");
        SellingParams::new(n, pairs.into_iter().zip(vals.iter().cloned()).collect())
    }

    /// All parameters equal to a constant.
    pub fn uniform(n: usize, c: Q) -> Self {
        SellingParams::from_slice(n, &vec![c; n * (n + 1) / 2]).unwrap()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `p_ij` for any index order (`i != j`).
    pub fn get(&self, i: usize, j: usize) -> &Q {
        let key = if i < j { (i, j) } else { (j, i) };
        &self.p[&key]
    }

    pub fn entries(&self) -> &BTreeMap<(usize, usize), Q> {
        &self.p
    }

    pub fn is_strict(&self) -> bool {
        self.p.values().all(|v| v.is_positive())
    }
}

/// An obtuse superbase of a concrete lattice: the parameters plus the
/// `(n+1) x n` integer matrix whose rows express `v_0..v_n` in the original
/// basis (rows sum to zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SellingData {
    pub params: SellingParams,
    pub superbase: ZMat,
}

/// Gram matrix in the basis `v_1..v_n` from Selling parameters:
/// `G_ii = sum_{k != i} p_ik`, `G_ij = -p_ij`.
pub fn lattice_from_selling(params: &SellingParams) -> Result<EuclideanLattice, VfkError> {
    let n = params.n();
    let mut rows = vec![vec![Q::zero(); n]; n];
    for i in 1..=n {
        for j in 1..=n {
            if i == j {
                let mut s = Q::zero();
                for k in 0..=n {
                    if k != i {
                        s += params.get(i, k).clone();
                    }
                }
                rows[i - 1][j - 1] = s;
            } else {
                rows[i - 1][j - 1] = -params.get(i, j).clone();
            }
        }
    }
    EuclideanLattice::new(QMat::from_rows(rows)).map_err(|_| VfkError::Degenerate)
}

/// The weighted cut form `sum_{i<j} p_ij (x_i - x_j)^2` on superbase
/// coordinates (invariant under adding a constant to all `x_i`).
pub fn selling_norm_sq(params: &SellingParams, x: &[Q]) -> Q {
    assert_eq!(x.len(), params.n() + 1, "expected n+1 coordinates");
    let mut acc = Q::zero();
    for ((i, j), p) in params.entries() {
        if p.is_zero() {
            continue;
        }
        let d = x[*i].clone() - x[*j].clone();
        acc += p.clone() * d.clone() * d;
    }
    acc
}

/// Superbase coordinates of the lattice point `v_S = sum_{i in S} v_i`
/// expressed in the basis `v_1..v_n` (using `v_0 = -(v_1 + ... + v_n)`).
fn subset_coords(n: usize, s: &BTreeSet<usize>) -> Vec<Q> {
    let zero_in = s.contains(&0);
    (1..=n)
        .map(|i| {
            let mut c = if s.contains(&i) { Q::one() } else { Q::zero() };
            if zero_in {
                c -= Q::one();
            }
            c
        })
        .collect()
}

fn dot_rows(g: &QMat, a: &[Z], b: &[Z]) -> Q {
    let aq: Vec<Q> = a.iter().map(|x| Q::from_integer(x.clone())).collect();
    let bq: Vec<Q> = b.iter().map(|x| Q::from_integer(x.clone())).collect();
    gram_pair(g, &aq, &bq)
}

/// Search for an obtuse superbase by sign flips.
///
/// Starts from `(-(e_1 + ... + e_n), e_1, ..., e_n)` and, while some
/// `p_ab < 0`, negates `v_a` and adds `v_a` to two partners (rank 2: `2 v_a`
/// to the single partner), keeping the sum zero and the tuple a superbase.
/// For rank <= 3 this strictly decreases `sum p_ij` each flip, so it
/// terminates in an obtuse superbase; for rank >= 4 the two partners
/// receiving `v_a` are chosen greedily (most negative `<v_a, v_k>`) and the
/// cap applies.
pub fn obtuse_superbase(
    e: &EuclideanLattice,
    max_flips: usize,
) -> Result<SellingData, VfkError> {
    let n = e.rank();
    if n == 0 {
        return Err(VfkError::ZeroRank);
    }
    let g = e.gram();
    // Rows v_0..v_n in the original basis.
    let mut rows: Vec<Vec<Z>> = Vec::with_capacity(n + 1);
    rows.push(vec![-Z::one(); n]);
    for i in 0..n {
        let mut r = vec![Z::zero(); n];
        r[i] = Z::one();
        rows.push(r);
    }

    let pair_list = index_pairs(n);
    let mut iterations = 0usize;
    let mut best_n: Option<Q> = None;
    loop {
        // Current parameters and the most negative one.
        let mut worst: Option<((usize, usize), Q)> = None;
        let mut sum_p = Q::zero();
        let mut p_now: BTreeMap<(usize, usize), Q> = BTreeMap::new();
        for &(i, j) in &pair_list {
            let p = -dot_rows(g, &rows[i], &rows[j]);
            sum_p += p.clone();
            if p.is_negative() && worst.as_ref().map_or(true, |(_, w)| p < *w) {
                worst = Some(((i, j), p.clone()));
            }
            p_now.insert((i, j), p);
        }
        // N = sum over nonempty proper subsets S of |v_S|^2 = 2^n * sum p.
        let n_val = sum_p * Q::from_integer(Z::one() << n);
        if best_n.as_ref().map_or(true, |b| n_val < *b) {
            best_n = Some(n_val);
        }

        let Some(((a, b), _)) = worst else {
            let params = SellingParams::new(n, p_now)?;
            return Ok(SellingData {
                params,
                superbase: ZMat::from_rows(rows),
            });
        };
        if iterations >= max_flips {
            return Err(VfkError::NotFound {
                iterations,
                best_n: best_n.unwrap(),
            });
        }

        // Flip: v_a -> -v_a; redistribute 2 v_a onto partners outside {a, b}.
        let others: Vec<usize> = (0..=n).filter(|&k| k != a && k != b).collect();
        let recipients: Vec<usize> = if others.len() == 1 {
            vec![others[0], others[0]]
        } else if others.len() == 2 {
            others
        } else {
            // Greedy: the two partners with the most negative <v_a, v_k>.
            others
                .into_iter()
                .map(|k| (dot_rows(g, &rows[a], &rows[k]), k))
                .sorted()
                .take(2)
                .map(|(_, k)| k)
                .collect()
        };
        let va = rows[a].clone();
        for k in recipients {
            for (rk, vai) in rows[k].iter_mut().zip(&va) {
                *rk += vai.clone();
            }
        }
        for x in rows[a].iter_mut() {
            *x = -std::mem::take(x);
        }
        iterations += 1;
    }
}

/// A maximal chain of subsets of `{0..n}`, encoded by a permutation
/// `(i_0, ..., i_n)`: the `k`-th set is `S_k = {i_k, ..., i_n}` for
/// `k = 1..n` (sizes `n` down to `1`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chain {
    perm: Vec<usize>,
}

impl Chain {
    pub fn new(perm: Vec<usize>, n: usize) -> Result<Self, VfkError> {
        if perm.len() != n + 1 {
            return Err(VfkError::NotAChain);
        }
        let mut seen = vec![false; n + 1];
        for &i in &perm {
            if i > n || seen[i] {
                return Err(VfkError::NotAChain);
            }
            seen[i] = true;
        }
        Ok(Chain { perm })
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// The sets `S_1 > S_2 > ... > S_n`.
    pub fn sets(&self) -> Vec<BTreeSet<usize>> {
        let n = self.perm.len() - 1;
        (1..=n)
            .map(|k| self.perm[k..].iter().copied().collect())
            .collect()
    }
}

/// The vertex of the cell supported by a chain: the unique solution of the
/// `n` facet equalities `2 <x, v_{S_k}> = |v_{S_k}|^2`, in the basis
/// `v_1..v_n`.
pub fn vertex_of_chain(params: &SellingParams, chain: &Chain) -> Result<Vec<Q>, VfkError> {
    let n = params.n();
    let e = lattice_from_selling(params)?;
    let mut rows = Vec::with_capacity(n);
    let mut rhs = Vec::with_capacity(n);
    for s in chain.sets() {
        let u = subset_coords(n, &s);
        let row: Vec<Q> = (0..n)
            .map(|i| {
                let mut acc = Q::zero();
                for j in 0..n {
                    if !u[j].is_zero() {
                        acc += e.gram().at(i, j).clone() * u[j].clone();
                    }
                }
                acc * Q::from_integer(Z::from(2))
            })
            .collect();
        rows.push(row);
        rhs.push(gram_quad(e.gram(), &u));
    }
    QMat::from_rows(rows)
        .solve_vec(&rhs)
        .ok_or(VfkError::Singular)
}

/// All `(n+1)!` vertices of the cell, one per chain, sorted. Requires
/// strictly positive parameters (otherwise chains can collide or degenerate;
/// fall back to the generic vertex enumerator).
pub fn all_vertices_vfk(params: &SellingParams) -> Result<Vec<Vec<Q>>, VfkError> {
    if !params.is_strict() {
        return Err(VfkError::NotStrictlyObtuse);
    }
    let n = params.n();
    let mut out = Vec::new();
    for perm in (0..=n).permutations(n + 1) {
        let chain = Chain::new(perm, n)?;
        out.push(vertex_of_chain(params, &chain)?);
    }
    out.sort();
    Ok(out)
}

/// A face of the cell cut out by a chain of facets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FaceDescriptor {
    pub dimension: usize,
    /// The subsets supporting the intersected facets, largest first.
    pub facets: Vec<BTreeSet<usize>>,
}

/// Face of the cell supported by a totally ordered family of nonempty
/// proper subsets: dimension `n - |family|`.
pub fn face_of_chain(
    params: &SellingParams,
    family: &[BTreeSet<usize>],
) -> Result<FaceDescriptor, VfkError> {
    let n = params.n();
    if family.is_empty() || family.len() > n {
        return Err(VfkError::NotAChain);
    }
    let mut sets: Vec<BTreeSet<usize>> = family.to_vec();
    sets.sort_by_key(|s| std::cmp::Reverse(s.len()));
    for s in &sets {
        if s.is_empty() || s.len() > n || s.iter().any(|&i| i > n) {
            return Err(VfkError::NotAChain);
        }
    }
    for w in sets.windows(2) {
        if !w[1].is_subset(&w[0]) || w[1].len() == w[0].len() {
            return Err(VfkError::NotAChain);
        }
    }
    Ok(FaceDescriptor {
        dimension: n - sets.len(),
        facets: sets,
    })
}

/// Whether the difference vectors `e_i - e_j` over pairs with `p_ij != 0`
/// generate the full zero-sum sublattice of `Z^(n+1)` (equivalently, the
/// graph of nonzero parameters is connected): rank `n` and all elementary
/// divisors 1.
pub fn selling_graph_generates(params: &SellingParams) -> bool {
    let n = params.n();
    let rows: Vec<Vec<Z>> = params
        .entries()
        .iter()
        .filter(|(_, p)| !p.is_zero())
        .map(|(&(i, j), _)| {
            let mut r = vec![Z::zero(); n + 1];
            r[i] = Z::one();
            r[j] = -Z::one();
            r
        })
        .collect();
    if rows.is_empty() {
        return false;
    }
    let m = ZMat::from_rows(rows);
    m.rank() == n && m.elementary_divisors().iter().all(|d| d.is_one())
}

/// Exact base-change margin of a superbase presentation: for ring elements
/// `beta_0..beta_n` (integer coordinates in a ring basis with exact trace
/// pairing `t2` and trace functional `trace`),
/// `sum_{k<l} p_kl * (T2(beta_l - beta_k) - Tr(beta_l - beta_k))`.
/// Each term is nonnegative because every embedding `z` of an algebraic
/// integer contributes `|z|^2 - Re z` and the embeddings' product has
/// absolute value >= 1.
pub fn base_change_margin(
    params: &SellingParams,
    t2: &QMat,
    trace: &[Q],
    beta: &[Vec<Z>],
) -> Q {
    let n = params.n();
    let d = t2.nrows();
    assert_eq!(beta.len(), n + 1, "expected n+1 ring elements");
    assert_eq!(trace.len(), d);
    let mut acc = Q::zero();
    for ((k, l), p) in params.entries() {
        if p.is_zero() {
            continue;
        }
        assert_eq!(beta[*k].len(), d);
        assert_eq!(beta[*l].len(), d);
        let x: Vec<Q> = beta[*l]
            .iter()
            .zip(&beta[*k])
            .map(|(bl, bk)| Q::from_integer(bl.clone() - bk.clone()))
            .collect();
        let t2x = gram_quad(t2, &x);
        let trx: Q = trace
            .iter()
            .zip(&x)
            .map(|(t, xi)| t.clone() * xi.clone())
            .sum();
        acc += p.clone() * (t2x - trx);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::EnumOpts;
    use crate::rational::{q, qi, zi};
    use crate::voronoi;

    fn p_a2() -> SellingParams {
        SellingParams::uniform(2, qi(1))
    }

    #[test]
    fn selling_gram_examples() {
        let e = lattice_from_selling(&p_a2()).unwrap();
        assert_eq!(e.gram(), &QMat::from_int_rows(&[&[2, -1], &[-1, 2]]));
        let e1 = lattice_from_selling(&SellingParams::from_slice(1, &[q(5, 3)]).unwrap()).unwrap();
        assert_eq!(e1.gram(), &QMat::from_rows(vec![vec![q(5, 3)]]));
        let e3 = lattice_from_selling(&SellingParams::uniform(3, qi(1))).unwrap();
        assert_eq!(
            e3.gram(),
            &QMat::from_int_rows(&[&[3, -1, -1], &[-1, 3, -1], &[-1, -1, 3]])
        );
        // Disconnected support degenerates.
        let bad = SellingParams::from_slice(2, &[qi(1), qi(0), qi(0)]).unwrap();
        assert_eq!(lattice_from_selling(&bad).unwrap_err(), VfkError::Degenerate);
        assert!(!selling_graph_generates(&bad));
        assert!(selling_graph_generates(&p_a2()));
    }

    #[test]
    fn cut_form_matches_gram() {
        // Constant vectors are null.
        assert_eq!(
            selling_norm_sq(&p_a2(), &[q(7, 3), q(7, 3), q(7, 3)]),
            qi(0)
        );
        assert_eq!(selling_norm_sq(&p_a2(), &[qi(0), qi(1), qi(2)]), qi(6));
        // Dropping x_0 = 0 gives the Gram form.
        let e = lattice_from_selling(&p_a2()).unwrap();
        for y in [[qi(1), qi(0)], [q(2, 3), q(-1, 5)], [qi(-2), qi(4)]] {
            let x = vec![qi(0), y[0].clone(), y[1].clone()];
            assert_eq!(selling_norm_sq(&p_a2(), &x), gram_quad(e.gram(), &y));
        }
    }

    #[test]
    fn obtuse_superbase_direct_cases() {
        let z2 = EuclideanLattice::standard(2);
        let sd = obtuse_superbase(&z2, 100).unwrap();
        assert_eq!(sd.params.get(0, 1), &qi(1));
        assert_eq!(sd.params.get(0, 2), &qi(1));
        assert_eq!(sd.params.get(1, 2), &qi(0));
        let a2 = lattice_from_selling(&p_a2()).unwrap();
        let sd2 = obtuse_superbase(&a2, 100).unwrap();
        assert_eq!(sd2.params, p_a2());
    }

    fn round_trip(e: &EuclideanLattice) {
        let sd = obtuse_superbase(e, 1000).unwrap();
        // Rows v_1..v_n as basis columns; pulled-back Gram must match the
        // Selling reconstruction.
        let n = e.rank();
        let cols: Vec<Vec<Z>> = (1..=n)
            .map(|i| (0..n).map(|j| sd.superbase.at(i, j).clone()).collect())
            .collect();
        let c = ZMat::from_cols(cols).to_qmat();
        let pulled = e.gram().pullback(&c);
        let rebuilt = lattice_from_selling(&sd.params).unwrap();
        assert_eq!(rebuilt.gram(), &pulled);
        // Superbase rows sum to zero.
        for j in 0..n {
            let s: Z = (0..=n).map(|i| sd.superbase.at(i, j).clone()).sum();
            assert!(s.is_zero());
        }
    }

    #[test]
    fn obtuse_superbase_flip_cases() {
        // Positive off-diagonal entries force flips.
        round_trip(&EuclideanLattice::new(QMat::from_int_rows(&[&[2, 1], &[1, 2]])).unwrap());
        round_trip(&EuclideanLattice::new(QMat::from_int_rows(&[&[1, 1], &[1, 2]])).unwrap());
        round_trip(
            &EuclideanLattice::new(QMat::from_int_rows(&[
                &[4, 1, -2],
                &[1, 5, 3],
                &[-2, 3, 6],
            ]))
            .unwrap(),
        );
        round_trip(
            &EuclideanLattice::new(QMat::from_int_rows(&[&[3, 2, 2], &[2, 4, 1], &[2, 1, 5]]))
                .unwrap(),
        );
    }

    #[test]
    fn rank4_heuristic() {
        // Z^4 succeeds immediately.
        assert!(obtuse_superbase(&EuclideanLattice::standard(4), 100).is_ok());
        // The checkerboard lattice in rank 4 has no obtuse superbase; the
        // heuristic must give up.
        let d4 = EuclideanLattice::new(QMat::from_int_rows(&[
            &[2, -1, 0, 0],
            &[-1, 2, -1, -1],
            &[0, -1, 2, 0],
            &[0, -1, 0, 2],
        ]))
        .unwrap();
        match obtuse_superbase(&d4, 200) {
            Err(VfkError::NotFound { iterations, best_n }) => {
                assert_eq!(iterations, 200);
                assert!(best_n.is_positive());
            }
            other => panic!("expected NotFound, got {:?}", other),
        }
    }

    #[test]
    fn chain_vertices() {
        // Identity chain on the hexagonal lattice: the deep hole.
        let chain = Chain::new(vec![0, 1, 2], 2).unwrap();
        let v = vertex_of_chain(&p_a2(), &chain).unwrap();
        assert_eq!(v, vec![q(1, 3), q(2, 3)]);
        let e = lattice_from_selling(&p_a2()).unwrap();
        assert_eq!(gram_quad(e.gram(), &v), q(2, 3));
        // Rank 1: the midpoint.
        let p1 = SellingParams::from_slice(1, &[qi(1)]).unwrap();
        let c1 = Chain::new(vec![0, 1], 1).unwrap();
        assert_eq!(vertex_of_chain(&p1, &c1).unwrap(), vec![q(1, 2)]);
        // All-ones parameters, identity chain: coordinates k/(n+1).
        for n in 2..=4usize {
            let p = SellingParams::uniform(n, qi(1));
            let chain = Chain::new((0..=n).collect(), n).unwrap();
            let v = vertex_of_chain(&p, &chain).unwrap();
            let expect: Vec<Q> = (1..=n)
                .map(|k| Q::new(zi(k as i64), zi((n + 1) as i64)))
                .collect();
            assert_eq!(v, expect);
        }
    }

    #[test]
    fn vertex_counts_and_agreement_with_generic_enumerator() {
        let v2 = all_vertices_vfk(&p_a2()).unwrap();
        assert_eq!(v2.len(), 6);
        let v3 = all_vertices_vfk(&SellingParams::uniform(3, qi(1))).unwrap();
        assert_eq!(v3.len(), 24);
        // Agreement with the halfspace-based enumerator, including a
        // non-uniform case.
        let cases = vec![
            p_a2(),
            SellingParams::from_slice(2, &[qi(1), qi(2), qi(3)]).unwrap(),
            SellingParams::uniform(3, qi(1)),
            SellingParams::from_slice(3, &[qi(1), qi(2), qi(1), qi(3), qi(1), qi(2)]).unwrap(),
        ];
        for p in cases {
            let e = lattice_from_selling(&p).unwrap();
            let rv = voronoi::relevant_vectors(&e, &EnumOpts::default()).unwrap();
            // Strict obtuse: every nonempty proper subset supports a facet.
            assert_eq!(rv.strict.len(), (1 << (p.n() + 1)) - 2);
            assert!(rv.weak.is_empty());
            let generic = voronoi::vertices(&e, &rv, 5).unwrap();
            let mut closed: Vec<Vec<Q>> = all_vertices_vfk(&p).unwrap();
            closed.dedup();
            assert_eq!(closed, generic);
        }
    }

    #[test]
    fn chain_vertices_lie_in_cell() {
        let p = SellingParams::from_slice(3, &[qi(2), qi(1), qi(1), qi(1), qi(2), qi(1)]).unwrap();
        let e = lattice_from_selling(&p).unwrap();
        let rv = voronoi::relevant_vectors(&e, &EnumOpts::default()).unwrap();
        for perm in [vec![0, 1, 2, 3], vec![3, 1, 0, 2], vec![2, 3, 1, 0]] {
            let v = vertex_of_chain(&p, &Chain::new(perm, 3).unwrap()).unwrap();
            assert!(voronoi::in_voronoi_cell(&e, &v, &rv));
        }
    }

    #[test]
    fn selling_identity_exact() {
        // |sum_k y_k v_{i_k} - s|^2 - |s|^2
        //   = sum_{k<l} p_{i_k i_l} [(y_l - y_k)^2 - (y_l - y_k)]
        // for the chain vertex s, any rational coefficients y.
        let cases = vec![
            (p_a2(), vec![0usize, 1, 2]),
            (p_a2(), vec![2, 0, 1]),
            (
                SellingParams::from_slice(2, &[qi(1), qi(2), qi(3)]).unwrap(),
                vec![1, 2, 0],
            ),
            (SellingParams::uniform(3, qi(1)), vec![3, 0, 2, 1]),
        ];
        let ys: Vec<Vec<Q>> = vec![
            vec![qi(1), qi(0), qi(0), qi(0)],
            vec![qi(0), qi(1), qi(-1), qi(2)],
            vec![q(1, 2), q(-1, 3), qi(1), qi(0)],
        ];
        for (p, perm) in cases {
            let n = p.n();
            let e = lattice_from_selling(&p).unwrap();
            let chain = Chain::new(perm.clone(), n).unwrap();
            let s = vertex_of_chain(&p, &chain).unwrap();
            for y in &ys {
                let y = &y[..=n];
                // Point sum_k y_k v_{i_k} in basis coordinates.
                let mut pt = vec![Q::zero(); n];
                for (k, &ik) in perm.iter().enumerate() {
                    let coords = subset_coords(n, &BTreeSet::from([ik]));
                    for (pc, cc) in pt.iter_mut().zip(coords) {
                        *pc += y[k].clone() * cc;
                    }
                }
                let diff: Vec<Q> = pt.iter().zip(&s).map(|(a, b)| a.clone() - b.clone()).collect();
                let lhs = gram_quad(e.gram(), &diff) - gram_quad(e.gram(), &s);
                let mut rhs = Q::zero();
                for k in 0..=n {
                    for l in (k + 1)..=n {
                        let d = y[l].clone() - y[k].clone();
                        rhs += p.get(perm[k], perm[l]).clone()
                            * (d.clone() * d.clone() - d);
                    }
                }
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn faces_and_chain_validation() {
        let p = p_a2();
        let vsets = vec![BTreeSet::from([1, 2]), BTreeSet::from([2])];
        let f = face_of_chain(&p, &vsets).unwrap();
        assert_eq!(f.dimension, 0);
        let f1 = face_of_chain(&p, &[BTreeSet::from([0, 1])]).unwrap();
        assert_eq!(f1.dimension, 1);
        // Incomparable sets are rejected.
        assert_eq!(
            face_of_chain(&p, &[BTreeSet::from([0]), BTreeSet::from([1])]).unwrap_err(),
            VfkError::NotAChain
        );
        // The full set and the empty set are rejected.
        assert!(face_of_chain(&p, &[BTreeSet::from([0, 1, 2])]).is_err());
        assert!(face_of_chain(&p, &[BTreeSet::new()]).is_err());
        assert_eq!(
            all_vertices_vfk(&SellingParams::from_slice(2, &[qi(1), qi(1), qi(0)]).unwrap())
                .unwrap_err(),
            VfkError::NotStrictlyObtuse
        );
    }

    #[test]
    fn incomparable_facets_share_no_vertex() {
        // On a strictly obtuse cell, facets intersect only along chains.
        let p = p_a2();
        let e = lattice_from_selling(&p).unwrap();
        let n = p.n();
        let verts = all_vertices_vfk(&p).unwrap();
        let subsets: Vec<BTreeSet<usize>> = (1u32..(1 << (n + 1)) - 1)
            .map(|bits| (0..=n).filter(|&i| bits >> i & 1 == 1).collect())
            .collect();
        let on_facet = |x: &[Q], s: &BTreeSet<usize>| {
            let u = subset_coords(n, s);
            let two_xv = Q::from_integer(zi(2)) * gram_pair(e.gram(), x, &u);
            two_xv == gram_quad(e.gram(), &u)
        };
        for s in &subsets {
            for t in &subsets {
                if s.is_subset(t) || t.is_subset(s) {
                    continue;
                }
                for v in &verts {
                    assert!(!(on_facet(v, s) && on_facet(v, t)));
                }
            }
        }
    }

    #[test]
    fn base_change_margin_examples() {
        // Rational ring: T2(x) = x^2, Tr(x) = x.
        let t2q = QMat::identity(1);
        let trq = vec![qi(1)];
        let p = p_a2();
        let zero = vec![vec![zi(0)], vec![zi(0)], vec![zi(0)]];
        assert_eq!(base_change_margin(&p, &t2q, &trq, &zero), qi(0));
        // Differences in {0, 1} give margin 0.
        let step = vec![vec![zi(0)], vec![zi(1)], vec![zi(1)]];
        assert_eq!(base_change_margin(&p, &t2q, &trq, &step), qi(0));
        // Any other integers give a positive margin.
        let wide = vec![vec![zi(0)], vec![zi(2)], vec![zi(-1)]];
        assert!(base_change_margin(&p, &t2q, &trq, &wide).is_positive());
        // Eisenstein ring: basis (1, w) with trace pairing [[2,-1],[-1,2]]
        // and traces (2, -1); beta = (0, w) over a single edge of weight 1.
        let t2 = QMat::from_int_rows(&[&[2, -1], &[-1, 2]]);
        let tr = vec![qi(2), qi(-1)];
        let p1 = SellingParams::from_slice(1, &[qi(1)]).unwrap();
        let beta = vec![vec![zi(0), zi(0)], vec![zi(0), zi(1)]];
        assert_eq!(base_change_margin(&p1, &t2, &tr, &beta), qi(3));
    }
}
