//! Deciding whether the Voronoi cell survives extension of scalars: the
//! finite per-vertex criterion with exact certificates, orbit-reduced
//! variants for the classical root lattices, rank-one margin sweeps,
//! cell-membership spot checks for extended points, and the induced size
//! invariance of extension classes.

use crate::enumerate::{self, BudgetExceeded, EnumOpts};
use crate::extension::{self, ExtError, ExtensionClass};
use crate::lattice::{hom_lattice, EuclideanLattice, LatticeError};
use crate::linalg::{gram_quad, QMat};
use crate::numberfield::{self, FieldError, NumberFieldData};
use crate::rational::{Q, Z};
use crate::voronoi::{self, VoronoiError};
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BaseChangeError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Voronoi(#[from] VoronoiError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Extension(#[from] ExtError),
}

impl From<BudgetExceeded> for BaseChangeError {
    fn from(e: BudgetExceeded) -> Self {
        BaseChangeError::Lattice(LatticeError::from(e))
    }
}

/// Outcome of the per-vertex criterion. `Holds` certifies that every
/// enumerated pair satisfies `2 <Delta P, beta> <= |beta|^2`; equalities
/// are legitimate boundary contacts and are counted. A violation is
/// reported with the first witness in (vertex, beta) enumeration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Holds { boundary_contacts: usize },
    Fails { vertex: Vec<Q>, beta: Vec<Z> },
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds { .. })
    }
}

/// Exact certificate for the finite criterion: for every cell vertex `P`
/// and every nonzero `beta` in the extended lattice with
/// `|beta|^2 <= radius_sq`, the halfspace inequality was verified.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionPCertificate {
    pub gram: QMat,
    pub field_degree: usize,
    /// Enumeration radius `4 [L:Q] rho^2`, sufficient for completeness.
    pub radius_sq: Q,
    pub vertices_checked: usize,
    /// Number of nonzero extended-lattice vectors inside the radius.
    pub betas_checked: usize,
    pub verdict: Verdict,
}

/// The invariance criterion at an explicit list of points. Points are
/// processed in the given order, candidate `beta`s in
/// (norm, lexicographic) order; the radius is `4 d max |P|^2` (or the
/// supplied squared covering radius). Used with the cell's vertex list
/// this decides the full condition; used with orbit representatives it
/// performs the symmetry-reduced check.
pub fn condition_p_at_points(
    e: &EuclideanLattice,
    k: &NumberFieldData,
    points: &[Vec<Q>],
    rho_sq: Option<Q>,
    opts: &EnumOpts,
) -> Result<ConditionPCertificate, BaseChangeError> {
    let n = e.rank();
    assert!(n >= 1, "the criterion concerns positive-rank lattices");
    let d = k.degree();
    let (ext, delta) = numberfield::extended_lattice(e, k)?;
    let rho_sq = match rho_sq {
        Some(r) => r,
        None => points
            .iter()
            .map(|p| gram_quad(e.gram(), p))
            .max()
            .unwrap_or_else(Q::zero),
    };
    let radius_sq = Q::from_integer(Z::from(4 * d as u64)) * rho_sq;
    let zeros = vec![Q::zero(); n * d];
    let within = enumerate::vectors_within(ext.gram(), &zeros, &radius_sq, opts)?;
    let betas: Vec<(Vec<Z>, Q)> = within
        .points
        .into_iter()
        .filter(|(v, _)| v.iter().any(|c| !c.is_zero()))
        .collect();
    let deltaq = delta.to_qmat();
    let mut boundary_contacts = 0usize;
    let mut verdict = None;
    'outer: for p in points {
        let dp = deltaq.mul_vec(p);
        for (beta, norm) in &betas {
            let bq: Vec<Q> = beta.iter().map(|c| Q::from_integer(c.clone())).collect();
            let lhs = Q::from_integer(Z::from(2)) * ext.inner(&dp, &bq);
            if &lhs > norm {
                verdict = Some(Verdict::Fails {
                    vertex: p.clone(),
                    beta: beta.clone(),
                });
                break 'outer;
            }
            if &lhs == norm {
                boundary_contacts += 1;
            }
        }
    }
    Ok(ConditionPCertificate {
        gram: e.gram().clone(),
        field_degree: d,
        radius_sq,
        vertices_checked: points.len(),
        betas_checked: betas.len(),
        verdict: verdict.unwrap_or(Verdict::Holds { boundary_contacts }),
    })
}

/// Decide whether extension of scalars to the ring of integers of the
/// field preserves the Voronoi cell, by the finite criterion over all
/// cell vertices.
pub fn condition_p(
    e: &EuclideanLattice,
    k: &NumberFieldData,
    opts: &EnumOpts,
) -> Result<ConditionPCertificate, BaseChangeError> {
    let vd = voronoi::voronoi_data(e, opts)?;
    condition_p_at_points(e, k, &vd.vertices, Some(vd.covering_radius_sq), opts)
}

/// Rank-one case: the criterion reduces to nonnegativity of the margin
/// `sum |s a|^2 - sum Re(s a)` over integral elements, swept here for all
/// `a` with pairing norm at most the bound.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rank1Margins {
    /// `(element, margin)` per nonzero integral element inside the bound.
    pub margins: Vec<(Vec<Z>, Q)>,
    pub all_nonnegative: bool,
}

pub fn rank1_invariance(
    k: &NumberFieldData,
    bound: &Q,
    opts: &EnumOpts,
) -> Result<Rank1Margins, BaseChangeError> {
    let mut margins = Vec::new();
    let mut all_nonnegative = true;
    for alpha in numberfield::elements_within(k, bound, opts)? {
        if alpha.iter().all(|c| c.is_zero()) {
            continue;
        }
        let m = numberfield::sumnorm_margin(k, &alpha)?;
        if m.is_negative() {
            all_nonnegative = false;
        }
        margins.push((alpha, m));
    }
    Ok(Rank1Margins {
        margins,
        all_nonnegative,
    })
}

// ---------------------------------------------------------------------------
// Root lattices with vertex orbit representatives
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootLatticeName {
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
}

impl std::fmt::Display for RootLatticeName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RootLatticeName::A(n) => write!(f, "A{}", n),
            RootLatticeName::D(n) => write!(f, "D{}", n),
            RootLatticeName::E6 => write!(f, "E6"),
            RootLatticeName::E7 => write!(f, "E7"),
            RootLatticeName::E8 => write!(f, "E8"),
        }
    }
}

/// A root lattice presented inside a standard ambient space, with one
/// representative per orbit of Voronoi-cell vertices under its
/// automorphism group (ambient coordinates).
#[derive(Debug, Clone)]
pub struct RootLatticeModel {
    pub name: RootLatticeName,
    pub ambient_dim: usize,
    /// Ambient columns of a lattice basis (rational entries for the
    /// `E`-series half-integer vectors).
    pub basis: QMat,
    pub lattice: EuclideanLattice,
    pub vertex_orbit_reps: Vec<Vec<Q>>,
}

fn qvec(entries: &[(i64, i64)]) -> Vec<Q> {
    entries.iter().map(|&(n, d)| Q::new(Z::from(n), Z::from(d))).collect()
}

fn columns_to_qmat(ambient: usize, cols: Vec<Vec<Q>>) -> QMat {
    let mut b = QMat::zeros(ambient, cols.len());
    for (j, col) in cols.iter().enumerate() {
        for (i, v) in col.iter().enumerate() {
            b.set(i, j, v.clone());
        }
    }
    b
}

fn diff_col(ambient: usize, i: usize, j: usize) -> Vec<Q> {
    let mut c = vec![Q::zero(); ambient];
    c[i] = Q::one();
    c[j] = -Q::one();
    c
}

pub fn root_lattice(name: &RootLatticeName) -> RootLatticeModel {
    let (ambient, cols, reps): (usize, Vec<Vec<Q>>, Vec<Vec<Q>>) = match name {
        RootLatticeName::A(n) => {
            let n = *n;
            assert!(n >= 1);
            let ambient = n + 1;
            let cols = (0..n).map(|i| diff_col(ambient, i, i + 1)).collect();
            let m = (n + 1) as i64;
            let reps = (1..=n as i64)
                .map(|i| {
                    let j = m - i;
                    let mut r = Vec::with_capacity(ambient);
                    r.extend(std::iter::repeat(Q::new(Z::from(j), Z::from(m))).take(i as usize));
                    r.extend(std::iter::repeat(Q::new(Z::from(-i), Z::from(m))).take(j as usize));
                    r
                })
                .collect();
            (ambient, cols, reps)
        }
        RootLatticeName::D(n) => {
            let n = *n;
            assert!(n >= 2);
            let mut cols: Vec<Vec<Q>> = (0..n - 1).map(|i| diff_col(n, i, i + 1)).collect();
            let mut last = vec![Q::zero(); n];
            last[n - 2] = Q::one();
            last[n - 1] = Q::one();
            cols.push(last);
            let half = vec![Q::new(Z::one(), Z::from(2)); n];
            let mut e1 = vec![Q::zero(); n];
            e1[0] = Q::one();
            (n, cols, vec![half, e1])
        }
        RootLatticeName::E8 => {
            let mut cols = vec![qvec(&[
                (1, 2),
                (-1, 2),
                (-1, 2),
                (-1, 2),
                (-1, 2),
                (-1, 2),
                (-1, 2),
                (1, 2),
            ])];
            let mut sum01 = vec![Q::zero(); 8];
            sum01[0] = Q::one();
            sum01[1] = Q::one();
            cols.push(sum01);
            for i in 0..6 {
                cols.push(diff_col(8, i + 1, i));
            }
            let mut deep = vec![Q::zero(); 8];
            deep[7] = Q::one();
            let thirds = qvec(&[
                (1, 3),
                (1, 3),
                (1, 3),
                (1, 3),
                (1, 3),
                (1, 3),
                (1, 3),
                (-1, 3),
            ]);
            (8, cols, vec![deep, thirds])
        }
        RootLatticeName::E7 => {
            // The sum-zero section of the rank-8 model: six coordinate
            // differences and one half-integer root.
            let mut cols: Vec<Vec<Q>> = (0..6).map(|i| diff_col(8, i, i + 1)).collect();
            cols.push(qvec(&[
                (1, 2),
                (1, 2),
                (1, 2),
                (-1, 2),
                (-1, 2),
                (-1, 2),
                (-1, 2),
                (1, 2),
            ]));
            let rep1 = qvec(&[
                (7, 8),
                (-1, 8),
                (-1, 8),
                (-1, 8),
                (-1, 8),
                (-1, 8),
                (-1, 8),
                (-1, 8),
            ]);
            let rep2 = qvec(&[
                (3, 4),
                (3, 4),
                (-1, 4),
                (-1, 4),
                (-1, 4),
                (-1, 4),
                (-1, 4),
                (-1, 4),
            ]);
            (8, cols, vec![rep1, rep2])
        }
        RootLatticeName::E6 => {
            // Section of the rank-8 model by two linear conditions: five
            // inner coordinate differences and one half-integer root.
            let mut cols: Vec<Vec<Q>> = (1..6).map(|i| diff_col(8, i, i + 1)).collect();
            cols.push(qvec(&[
                (-1, 2),
                (1, 2),
                (1, 2),
                (1, 2),
                (-1, 2),
                (-1, 2),
                (-1, 2),
                (1, 2),
            ]));
            let rep = qvec(&[
                (0, 1),
                (2, 3),
                (2, 3),
                (-1, 3),
                (-1, 3),
                (-1, 3),
                (-1, 3),
                (0, 1),
            ]);
            (8, cols, vec![rep])
        }
    };
    let basis = columns_to_qmat(ambient, cols);
    let gram = basis.transpose().mul(&basis);
    let lattice = EuclideanLattice::new(gram).expect("root lattice Grams are positive-definite");
    RootLatticeModel {
        name: name.clone(),
        ambient_dim: ambient,
        basis,
        lattice,
        vertex_orbit_reps: reps,
    }
}

impl RootLatticeModel {
    /// Exact basis coordinates of an ambient point of the rational span.
    pub fn ambient_to_basis(&self, p: &[Q]) -> Vec<Q> {
        assert_eq!(p.len(), self.ambient_dim);
        let bt = self.basis.transpose();
        let rhs = bt.mul_vec(p);
        let coords = self
            .lattice
            .gram()
            .solve_vec(&rhs)
            .expect("Gram is invertible");
        let back = self.basis.mul_vec(&coords);
        assert_eq!(back, p, "point lies outside the lattice span");
        coords
    }
}

/// Symmetry-reduced criterion: run the per-vertex check only at the orbit
/// representatives of the cell vertices. Sound for the full condition by
/// equivariance of the cell under the automorphism group.
pub fn condition_p_orbit(
    model: &RootLatticeModel,
    k: &NumberFieldData,
    opts: &EnumOpts,
) -> Result<ConditionPCertificate, BaseChangeError> {
    let points: Vec<Vec<Q>> = model
        .vertex_orbit_reps
        .iter()
        .map(|p| model.ambient_to_basis(p))
        .collect();
    let rho_sq = model
        .vertex_orbit_reps
        .iter()
        .map(|p| p.iter().map(|c| c.clone() * c.clone()).sum::<Q>())
        .max()
        .expect("orbit representative list is nonempty");
    condition_p_at_points(&model.lattice, k, &points, Some(rho_sq), opts)
}

/// Whether the image of a point of the real span of `E` under the
/// diagonal embedding lies in the Voronoi cell of the extended lattice
/// (exact halfspace test against its strict relevant vectors).
pub fn vsmall_check(
    e: &EuclideanLattice,
    k: &NumberFieldData,
    x: &[Q],
    opts: &EnumOpts,
) -> Result<bool, BaseChangeError> {
    let (ext, delta) = numberfield::extended_lattice(e, k)?;
    let relevant = voronoi::relevant_vectors(&ext, opts)?;
    let target = delta.to_qmat().mul_vec(x);
    Ok(voronoi::in_voronoi_cell(&ext, &target, &relevant))
}

// ---------------------------------------------------------------------------
// Size invariance of extension classes
// ---------------------------------------------------------------------------

/// Joint report: the size of a class before and after base change, exact
/// equality of the underlying squared distances (`dist_ext^2 = d dist^2`),
/// and the criterion verdict for the relevant morphism lattice.
#[derive(Debug, Clone)]
pub struct SizeInvarianceReport {
    pub size: crate::enclosure::LogValue,
    pub base_changed_size: crate::enclosure::LogValue,
    /// Exact: the squared base-changed distance equals degree times the
    /// squared distance (hence the sizes agree to every tolerance).
    pub equal_within_tolerance: bool,
    pub condition_p: Verdict,
}

pub fn size_invariance_report(
    c: &ExtensionClass,
    k: &NumberFieldData,
    opts: &EnumOpts,
) -> Result<SizeInvarianceReport, BaseChangeError> {
    let h = hom_lattice(c.f(), c.g());
    let cert = condition_p(&h, k, opts)?;
    let dist = c.dist_sq().clone();
    let ext_dist = extension::base_changed_dist_sq(c, k, opts)?;
    let equal = ext_dist == Q::from_integer(Z::from(k.degree() as u64)) * dist;
    Ok(SizeInvarianceReport {
        size: c.size(),
        base_changed_size: extension::base_changed_size(c, k, opts)?,
        equal_within_tolerance: equal,
        condition_p: cert.verdict,
    })
}
