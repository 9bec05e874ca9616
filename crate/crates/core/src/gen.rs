//! Seeded generators for random-but-reproducible test inputs: positive-
//! definite Gram matrices, unimodular recombinations, extension-class
//! representatives, and rational target points. All randomness flows from
//! an explicit 64-bit seed through one fixed stream cipher, so identical
//! seeds give identical objects on every platform.

use crate::lattice::EuclideanLattice;
use crate::linalg::{QMat, ZMat};
use crate::rational::{q, Q, Z};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const DEFAULT_SEED: u64 = 42;

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// A random positive-definite integer Gram matrix: `B^T B + I` with `B`
/// a square matrix of small integers. The shift keeps the result
/// comfortably definite even when `B` is singular.
pub fn random_gram(rng: &mut ChaCha20Rng, rank: usize) -> QMat {
    assert!(rank >= 1);
    let mut b = ZMat::zeros(rank, rank);
    for i in 0..rank {
        for j in 0..rank {
            b.set(i, j, Z::from(rng.gen_range(-2i64..=3)));
        }
    }
    let bq = b.to_qmat();
    let mut g = bq.transpose().mul(&bq);
    for i in 0..rank {
        let d = g.at(i, i).clone() + Q::one();
        g.set(i, i, d);
    }
    g
}

pub fn random_lattice(rng: &mut ChaCha20Rng, rank: usize) -> EuclideanLattice {
    EuclideanLattice::new(random_gram(rng, rank)).expect("construction is positive-definite")
}

/// A random unimodular matrix: a product of `steps` elementary column
/// operations (add a small multiple of one column to another, or negate).
pub fn random_unimodular(rng: &mut ChaCha20Rng, rank: usize, steps: usize) -> ZMat {
    assert!(rank >= 1);
    let mut u = ZMat::identity(rank);
    if rank == 1 {
        if rng.gen_range(0..2) == 1 {
            u.set(0, 0, Z::from(-1));
        }
        return u;
    }
    for _ in 0..steps {
        let i = rng.gen_range(0..rank);
        let mut j = rng.gen_range(0..rank);
        while j == i {
            j = rng.gen_range(0..rank);
        }
        let c = Z::from(rng.gen_range(-2i64..=2));
        for r in 0..rank {
            let v = u.at(r, j).clone() + c.clone() * u.at(r, i).clone();
            u.set(r, j, v);
        }
        if rng.gen_range(0..4) == 0 {
            for r in 0..rank {
                let v = -u.at(r, i).clone();
                u.set(r, i, v);
            }
        }
    }
    u
}

/// A random rational point with entries `n/d`, `|n| <= num_bound`,
/// `1 <= d <= den_bound`.
pub fn random_point(
    rng: &mut ChaCha20Rng,
    dim: usize,
    num_bound: i64,
    den_bound: i64,
) -> Vec<Q> {
    (0..dim)
        .map(|_| q(rng.gen_range(-num_bound..=num_bound), rng.gen_range(1..=den_bound)))
        .collect()
}

/// A random `rows x cols` rational matrix with the same entry bounds.
pub fn random_qmat(
    rng: &mut ChaCha20Rng,
    rows: usize,
    cols: usize,
    num_bound: i64,
    den_bound: i64,
) -> QMat {
    let mut t = QMat::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            t.set(
                i,
                j,
                q(rng.gen_range(-num_bound..=num_bound), rng.gen_range(1..=den_bound)),
            );
        }
    }
    t
}
