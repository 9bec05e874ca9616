//! Voronoi cells of Euclidean lattices: relevant vectors, exact
//! closest-vector solving, cell membership, vertex enumeration, and the
//! covering radius.
//!
//! The Voronoi cell is the set of ambient points at least as close to the
//! origin as to any other lattice point. It is cut out by finitely many
//! halfspaces `2<x, v> <= |v|^2`; the vectors `v` that support facets
//! ("strict" relevant vectors) are exactly the vectors that are, up to sign,
//! the unique norm minimizers of their class modulo `2E`. Non-unique
//! minimizers ("weak") support faces of codimension at least 2 and are
//! reported but never used as constraints.
//!
//! All coordinates and radii are exact rationals. Vertices are found by
//! solving every rank-sized subset of facet equalities and keeping the
//! solutions that lie in the cell; the covering radius is the maximal vertex
//! norm (the squared distance to the lattice is piecewise quadratic on the
//! cell, so its maximum is attained at a vertex).

use crate::enumerate::{self, BudgetExceeded, EnumOpts};
use crate::lattice::EuclideanLattice;
use crate::linalg::{gram_quad, QMat};
use crate::rational::{Q, Z};
use itertools::Itertools;
use num_traits::{One, Zero};
use std::collections::BTreeSet;
use thiserror::Error;

/// Rank cap for vertex enumeration (the facet-subset count grows as
/// `C(2(2^n - 1), n)`).
pub const DEFAULT_VERTEX_RANK_CAP: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VoronoiError {
    #[error("operation requires positive rank")]
    ZeroRank,
    #[error("vertex enumeration is capped at rank {cap}, got rank {rank}")]
    RankCapExceeded { rank: usize, cap: usize },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Norm minimizers of the nonzero classes of `E/2E`, split by uniqueness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantVectors {
    /// Facet-supporting vectors: the +/- unique minimizers of their class.
    pub strict: Vec<Vec<Z>>,
    /// Minimizers of classes with several +/- pairs of minimizers.
    pub weak: Vec<Vec<Z>>,
}

/// Exact closest-vector result: the squared distance and all minimizers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClosestResult {
    pub dist_sq: Q,
    /// All lattice vectors attaining `dist_sq`, sorted lexicographically.
    pub closest: Vec<Vec<Z>>,
}

/// Full description of the Voronoi cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VoronoiData {
    pub relevant: RelevantVectors,
    /// Vertices of the cell, exact rational coordinates, sorted.
    pub vertices: Vec<Vec<Q>>,
    /// Squared covering radius: the maximal squared vertex norm.
    pub covering_radius_sq: Q,
}

/// Relevant vectors via the coset method: for each of the `2^n - 1` nonzero
/// classes `c` of `E/2E`, the minimizers of the norm on `c + 2E` are
/// `c + 2w` where `w` ranges over the lattice points closest to `-c/2`
/// (the norm is `4 |w + c/2|^2`). A class contributes strict vectors when it
/// has exactly one +/- pair of minimizers.
pub fn relevant_vectors(
    e: &EuclideanLattice,
    opts: &EnumOpts,
) -> Result<RelevantVectors, VoronoiError> {
    let n = e.rank();
    if n == 0 {
        return Err(VoronoiError::ZeroRank);
    }
    let mut strict = Vec::new();
    let mut weak = Vec::new();
    for bits in 1u64..(1u64 << n) {
        let c: Vec<Z> = (0..n)
            .map(|i| if bits >> i & 1 == 1 { Z::one() } else { Z::zero() })
            .collect();
        let target: Vec<Q> = c.iter().map(|ci| Q::new(-ci.clone(), Z::from(2))).collect();
        let cvp = enumerate::closest_vectors(e.gram(), &target, opts)?;
        let class_vectors: Vec<Vec<Z>> = cvp
            .minimizers
            .into_iter()
            .map(|w| {
                c.iter()
                    .zip(w)
                    .map(|(ci, wi)| ci.clone() + Z::from(2) * wi)
                    .collect()
            })
            .collect();
        if class_vectors.len() == 2 {
            strict.extend(class_vectors);
        } else {
            weak.extend(class_vectors);
        }
    }
    strict.sort();
    weak.sort();
    Ok(RelevantVectors { strict, weak })
}

/// Exact closest lattice vector(s) to a rational point.
pub fn closest_vector(
    e: &EuclideanLattice,
    x: &[Q],
    opts: &EnumOpts,
) -> Result<ClosestResult, VoronoiError> {
    let cvp = enumerate::closest_vectors(e.gram(), x, opts)?;
    Ok(ClosestResult {
        dist_sq: cvp.min_norm,
        closest: cvp.minimizers,
    })
}

/// Membership in the (closed) Voronoi cell: all strict halfspace
/// constraints `2<x, v> <= |v|^2` hold.
pub fn in_voronoi_cell(e: &EuclideanLattice, x: &[Q], relevant: &RelevantVectors) -> bool {
    relevant.strict.iter().all(|v| {
        let vq: Vec<Q> = v.iter().map(|c| Q::from_integer(c.clone())).collect();
        let two_xv = Q::from_integer(Z::from(2)) * e.inner(x, &vq);
        two_xv <= e.norm_sq(v)
    })
}

/// All vertices of the Voronoi cell, exact and sorted.
///
/// Solves each rank-sized subset of the strict facet equalities
/// `2 (G v)^T x = |v|^2` and keeps the solutions lying in the cell.
pub fn vertices(
    e: &EuclideanLattice,
    relevant: &RelevantVectors,
    cap: usize,
) -> Result<Vec<Vec<Q>>, VoronoiError> {
    let n = e.rank();
    if n == 0 {
        return Err(VoronoiError::ZeroRank);
    }
    if n > cap {
        return Err(VoronoiError::RankCapExceeded { rank: n, cap });
    }
    // Facet data: normal row 2*G*v and right-hand side |v|^2.
    let facets: Vec<(Vec<Q>, Q)> = relevant
        .strict
        .iter()
        .map(|v| {
            let vq: Vec<Q> = v.iter().map(|c| Q::from_integer(c.clone())).collect();
            let row: Vec<Q> = (0..n)
                .map(|i| {
                    let mut acc = Q::zero();
                    for j in 0..n {
                        if !vq[j].is_zero() {
                            acc += e.gram().at(i, j).clone() * vq[j].clone();
                        }
                    }
                    acc * Q::from_integer(Z::from(2))
                })
                .collect();
            (row, e.norm_sq(v))
        })
        .collect();

    let mut found: BTreeSet<Vec<Q>> = BTreeSet::new();
    for subset in (0..facets.len()).combinations(n) {
        let a = QMat::from_rows(subset.iter().map(|&i| facets[i].0.clone()).collect());
        let b: Vec<Q> = subset.iter().map(|&i| facets[i].1.clone()).collect();
        let Some(x) = a.solve_vec(&b) else { continue };
        if in_voronoi_cell(e, &x, relevant) {
            found.insert(x);
        }
    }
    Ok(found.into_iter().collect())
}

/// Squared covering radius: the maximal squared norm over cell vertices.
pub fn covering_radius_sq(
    e: &EuclideanLattice,
    relevant: &RelevantVectors,
    cap: usize,
) -> Result<Q, VoronoiError> {
    let verts = vertices(e, relevant, cap)?;
    Ok(verts
        .iter()
        .map(|x| gram_quad(e.gram(), x))
        .max()
        .expect("a full-dimensional cell has vertices"))
}

/// Compute the complete cell description with the default rank cap.
pub fn voronoi_data(e: &EuclideanLattice, opts: &EnumOpts) -> Result<VoronoiData, VoronoiError> {
    let relevant = relevant_vectors(e, opts)?;
    let vertices = vertices(e, &relevant, DEFAULT_VERTEX_RANK_CAP)?;
    let covering_radius_sq = vertices
        .iter()
        .map(|x| gram_quad(e.gram(), x))
        .max()
        .expect("a full-dimensional cell has vertices");
    Ok(VoronoiData {
        relevant,
        vertices,
        covering_radius_sq,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi, zi};

    fn opts() -> EnumOpts {
        EnumOpts::default()
    }

    fn z_n(n: usize) -> EuclideanLattice {
        EuclideanLattice::standard(n)
    }

    fn a2() -> EuclideanLattice {
        EuclideanLattice::new(QMat::from_int_rows(&[&[2, -1], &[-1, 2]])).unwrap()
    }

    #[test]
    fn relevant_vectors_z2() {
        let rv = relevant_vectors(&z_n(2), &opts()).unwrap();
        assert_eq!(
            rv.strict,
            vec![
                vec![zi(-1), zi(0)],
                vec![zi(0), zi(-1)],
                vec![zi(0), zi(1)],
                vec![zi(1), zi(0)],
            ]
        );
        assert_eq!(
            rv.weak,
            vec![
                vec![zi(-1), zi(-1)],
                vec![zi(-1), zi(1)],
                vec![zi(1), zi(-1)],
                vec![zi(1), zi(1)],
            ]
        );
    }

    #[test]
    fn relevant_vectors_a2_and_rank1() {
        let rv = relevant_vectors(&a2(), &opts()).unwrap();
        assert_eq!(rv.strict.len(), 6);
        assert!(rv.weak.is_empty());
        for v in &rv.strict {
            assert_eq!(a2().norm_sq(v), qi(2));
        }
        let rv1 = relevant_vectors(&z_n(1), &opts()).unwrap();
        assert_eq!(rv1.strict, vec![vec![zi(-1)], vec![zi(1)]]);
        assert!(rv1.weak.is_empty());
    }

    #[test]
    fn closest_vector_examples() {
        let r = closest_vector(&z_n(2), &[q(2, 5), q(7, 10)], &opts()).unwrap();
        assert_eq!(r.dist_sq, q(1, 4));
        assert_eq!(r.closest, vec![vec![zi(0), zi(1)]]);
        // Deep hole of the hexagonal lattice: three closest vectors.
        let r2 = closest_vector(&a2(), &[q(1, 3), q(2, 3)], &opts()).unwrap();
        assert_eq!(r2.dist_sq, q(2, 3));
        assert_eq!(
            r2.closest,
            vec![
                vec![zi(0), zi(0)],
                vec![zi(0), zi(1)],
                vec![zi(1), zi(1)],
            ]
        );
        // A lattice point is its own unique closest vector.
        let r3 = closest_vector(&a2(), &[qi(3), qi(-2)], &opts()).unwrap();
        assert_eq!(r3.dist_sq, qi(0));
        assert_eq!(r3.closest, vec![vec![zi(3), zi(-2)]]);
    }

    #[test]
    fn membership() {
        let rv = relevant_vectors(&z_n(2), &opts()).unwrap();
        assert!(in_voronoi_cell(&z_n(2), &[q(1, 2), q(1, 2)], &rv));
        assert!(!in_voronoi_cell(&z_n(2), &[q(3, 5), qi(0)], &rv));
        // Agreement with the closest-vector oracle on a few points:
        // x is in the cell iff dist(x, E) = |x|.
        let pts = [
            vec![q(1, 3), q(-2, 7)],
            vec![q(5, 8), q(1, 2)],
            vec![q(-9, 10), q(3, 4)],
            vec![qi(0), q(-1, 2)],
        ];
        for x in &pts {
            let inside = in_voronoi_cell(&z_n(2), x, &rv);
            let d = closest_vector(&z_n(2), x, &opts()).unwrap().dist_sq;
            assert_eq!(inside, d == gram_quad(z_n(2).gram(), x), "{:?}", x);
        }
    }

    #[test]
    fn vertices_and_covering_radius() {
        let rv = relevant_vectors(&z_n(2), &opts()).unwrap();
        let vs = vertices(&z_n(2), &rv, DEFAULT_VERTEX_RANK_CAP).unwrap();
        assert_eq!(
            vs,
            vec![
                vec![q(-1, 2), q(-1, 2)],
                vec![q(-1, 2), q(1, 2)],
                vec![q(1, 2), q(-1, 2)],
                vec![q(1, 2), q(1, 2)],
            ]
        );
        assert_eq!(
            covering_radius_sq(&z_n(2), &rv, DEFAULT_VERTEX_RANK_CAP).unwrap(),
            q(1, 2)
        );
        // Hexagonal cell: 6 vertices, all of squared norm 2/3.
        let rva = relevant_vectors(&a2(), &opts()).unwrap();
        let va = vertices(&a2(), &rva, DEFAULT_VERTEX_RANK_CAP).unwrap();
        assert_eq!(va.len(), 6);
        for x in &va {
            assert_eq!(gram_quad(a2().gram(), x), q(2, 3));
        }
        assert_eq!(
            covering_radius_sq(&a2(), &rva, DEFAULT_VERTEX_RANK_CAP).unwrap(),
            q(2, 3)
        );
        // Rank 1, gram [[c]]: vertices +/- 1/2, radius c/4.
        let l = EuclideanLattice::rank1(q(5, 3)).unwrap();
        let rvl = relevant_vectors(&l, &opts()).unwrap();
        assert_eq!(
            vertices(&l, &rvl, DEFAULT_VERTEX_RANK_CAP).unwrap(),
            vec![vec![q(-1, 2)], vec![q(1, 2)]]
        );
        assert_eq!(
            covering_radius_sq(&l, &rvl, DEFAULT_VERTEX_RANK_CAP).unwrap(),
            q(5, 12)
        );
    }

    #[test]
    fn cube_covering_radius_and_homogeneity() {
        for n in 1..=4usize {
            let data = voronoi_data(&z_n(n), &opts()).unwrap();
            assert_eq!(data.covering_radius_sq, Q::new(zi(n as i64), zi(4)));
        }
        // rho^2 scales with the metric.
        let c = q(7, 2);
        let scaled = a2().scale_metric(&c);
        let rv = relevant_vectors(&scaled, &opts()).unwrap();
        assert_eq!(
            covering_radius_sq(&scaled, &rv, DEFAULT_VERTEX_RANK_CAP).unwrap(),
            c * q(2, 3)
        );
    }

    #[test]
    fn rank_cap_enforced() {
        let rv = relevant_vectors(&z_n(3), &opts()).unwrap();
        assert_eq!(
            vertices(&z_n(3), &rv, 2).unwrap_err(),
            VoronoiError::RankCapExceeded { rank: 3, cap: 2 }
        );
    }

    #[test]
    fn tiling_translates_land_in_cell() {
        // x - c lies in the cell for every closest vector c.
        let e = a2();
        let rv = relevant_vectors(&e, &opts()).unwrap();
        let pts = [
            vec![q(1, 3), q(2, 3)],
            vec![q(17, 5), q(-9, 4)],
            vec![q(-1, 2), q(1, 7)],
        ];
        for x in &pts {
            let r = closest_vector(&e, x, &opts()).unwrap();
            for c in &r.closest {
                let shifted: Vec<Q> = x
                    .iter()
                    .zip(c)
                    .map(|(xi, ci)| xi.clone() - Q::from_integer(ci.clone()))
                    .collect();
                assert!(in_voronoi_cell(&e, &shifted, &rv));
            }
        }
    }

    #[test]
    fn transference_on_small_examples() {
        // 1/4 <= rho^2 * lambda1^2(dual) <= n^2/4.
        for e in [z_n(2), a2(), z_n(3)] {
            let n = e.rank();
            let data = voronoi_data(&e, &opts()).unwrap();
            let l1d = e.dual().lambda1_sq(&opts()).unwrap();
            let prod = data.covering_radius_sq.clone() * l1d;
            assert!(prod >= q(1, 4));
            assert!(prod <= Q::new(zi((n * n) as i64), zi(4)));
        }
    }

    #[test]
    fn d4_cell_is_the_24_cell() {
        // All 24 minimal vectors are strict; the cell has 24 vertices and
        // covering radius 1.
        let d4 = EuclideanLattice::new(QMat::from_int_rows(&[
            &[2, -1, 0, 0],
            &[-1, 2, -1, -1],
            &[0, -1, 2, 0],
            &[0, -1, 0, 2],
        ]))
        .unwrap();
        let data = voronoi_data(&d4, &opts()).unwrap();
        assert_eq!(data.relevant.strict.len(), 24);
        assert_eq!(data.vertices.len(), 24);
        assert_eq!(data.covering_radius_sq, qi(1));
    }
}
