//! Exact geometry of Euclidean lattices.
//!
//! This crate computes, in exact rational arithmetic wherever the quantity is
//! rational and in certified interval arithmetic otherwise:
//!
//! * lattice invariants — determinants, arithmetic degrees and slopes, duals,
//!   tensor/hom constructions, shortest vectors, maximal slopes;
//! * Voronoi cells — relevant vectors, closest-vector problems, vertices and
//!   covering radii;
//! * obtuse superbases and Selling parameters, with the full vertex
//!   combinatorics of lattices of Voronoi's first kind;
//! * rings of integers of cyclotomic and totally real fields — trace forms,
//!   Ramanujan sums, discriminants, codifferent duality;
//! * extensions of one lattice by another — classes, sizes (a closest-vector
//!   distance in a hom lattice), Baer sums, duality, splitting defects;
//! * the family of rank-two extensions indexed by rational points of the
//!   projective line, together with the Ford-circle picture;
//! * reduction theory — reduced flags, line splittings, and explicit bounds
//!   on the loss of orthogonality;
//! * base-change certificates: finite enumerations deciding whether a
//!   closest-vector distance is preserved when scalars are extended from the
//!   rationals to a number field.
//!
//! All decision procedures are exact: inequalities between logarithms of
//! rationals are decided by comparing rational powers, and the few genuinely
//! transcendental comparisons (involving `pi`) use certified enclosures whose
//! precision is controlled by `ARAKELOV_PRECISION_BITS`.

#![forbid(unsafe_code)]

pub mod arith;
pub mod basechange;
pub mod battery;
pub mod cli;
pub mod enclosure;
pub mod enumerate;
pub mod extension;
pub mod gen;
pub mod jsonio;
pub mod lattice;
pub mod linalg;
pub mod numberfield;
pub mod p1ext;
pub mod poly;
pub mod rational;
pub mod reduction;
pub mod vfk;
pub mod voronoi;
