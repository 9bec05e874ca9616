//! The verification battery: twelve self-contained checks covering the
//! library's main guarantees, shared by the acceptance test target and
//! the `verify-all` command. Each check returns a single pass/fail/
//! undecided report with a machine-readable detail payload; random
//! sweeps are seeded and fully reproducible.

use crate::basechange::{self, RootLatticeName};
use crate::enclosure::{ln_ball_volume, ln_q, precision_bits, psi_fn, Enc, ExactLn};
use crate::enumerate::{self, EnumOpts};
use crate::extension::{self, AdmissibleExtension, ExtensionClass};
use crate::gen;
use crate::jsonio::{CheckReport, CheckStatus, RunReport};
use crate::lattice::{hom_lattice, mu_max, EuclideanLattice, MuMaxMethod};
use crate::linalg::{gram_quad, QMat, ZMat};
use crate::numberfield::{self, NumberFieldData};
use crate::p1ext::{ford_tangency, CircleQ, ProjPoint};
use crate::poly::Poly;
use crate::rational::{q, qi, zi, Q, Z};
use crate::reduction::{
    self, c_bound_tight, delta_invariant, dual_reduced_flag, sigma_norm_report, split_flag,
    step_quotient,
};
use crate::vfk::{self, Chain, SellingParams};
use crate::voronoi;
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use serde_json::{json, Value};

/// Knobs for the battery. `samples` scales every random sweep; `heavy`
/// enables the large scalar-extension instances (rank-4 lattices over a
/// degree-4 field). The defaults are the full acceptance settings.
#[derive(Debug, Clone)]
pub struct BatteryConfig {
    pub seed: u64,
    pub samples: usize,
    /// Coordinate bound for the projective-line sweeps.
    pub p1_bound: i64,
    pub heavy: bool,
    pub bits: u32,
    pub opts: EnumOpts,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            seed: gen::DEFAULT_SEED,
            samples: 100,
            p1_bound: 50,
            heavy: true,
            bits: precision_bits(),
            opts: EnumOpts::default(),
        }
    }
}

impl BatteryConfig {
    /// Reduced settings for interactive runs.
    pub fn quick() -> Self {
        BatteryConfig {
            samples: 12,
            p1_bound: 15,
            heavy: false,
            ..BatteryConfig::default()
        }
    }
}

/// A check failure: either a definite counterexample/mismatch or an
/// inequality the interval layer could not separate at any tried
/// precision.
#[derive(Debug)]
pub struct CheckFail {
    pub undecided: bool,
    pub message: String,
}

impl CheckFail {
    fn fail(message: impl Into<String>) -> CheckFail {
        CheckFail {
            undecided: false,
            message: message.into(),
        }
    }

    fn undecided(message: impl Into<String>) -> CheckFail {
        CheckFail {
            undecided: true,
            message: message.into(),
        }
    }
}

impl<E: std::error::Error> From<E> for CheckFail {
    fn from(e: E) -> Self {
        CheckFail::fail(format!("library error: {e}"))
    }
}

fn run_check<F>(name: &str, f: F) -> CheckReport
where
    F: FnOnce() -> Result<Value, CheckFail>,
{
    match f() {
        Ok(detail) => CheckReport {
            name: name.to_string(),
            status: CheckStatus::Pass,
            detail,
        },
        Err(e) => CheckReport {
            name: name.to_string(),
            status: if e.undecided {
                CheckStatus::Undecided
            } else {
                CheckStatus::Fail
            },
            detail: json!({ "message": e.message }),
        },
    }
}

/// Prove `enc(bits) >= 0`, widening precision twice before giving up.
fn prove_nonneg<F>(f: F, bits: u32, what: &str) -> Result<(), CheckFail>
where
    F: Fn(u32) -> Enc,
{
    for b in [bits, bits * 2, bits * 4] {
        let e = f(b);
        if !e.lo.is_negative() {
            return Ok(());
        }
        if e.hi.is_negative() {
            return Err(CheckFail::fail(format!("{what}: enclosure is negative")));
        }
    }
    Err(CheckFail::undecided(format!(
        "{what}: sign not separated at {} bits",
        bits * 4
    )))
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

// ---------------------------------------------------------------------------
// 1. Sizes of the standard quotient family
// ---------------------------------------------------------------------------

/// The rank-`n` quotient of the standard cubic lattice by the sum-zero
/// root sublattice has squared extension size exactly `n`.
pub fn check_quotient_family_sizes(cfg: &BatteryConfig) -> CheckReport {
    run_check("quotient-family-sizes", || {
        for n in 1..=8usize {
            let c = extension::class_of(&extension::an_example(n), &cfg.opts)?;
            if c.dist_sq() != &qi(n as i64) {
                return Err(CheckFail::fail(format!(
                    "rank {n}: squared size {} instead of {n}",
                    c.dist_sq()
                )));
            }
        }
        Ok(json!({ "ranks": "1..=8", "identity": "dist_sq = rank" }))
    })
}

// ---------------------------------------------------------------------------
// 2. Cyclotomic pairing matrices
// ---------------------------------------------------------------------------

/// Power-basis pairings of roots of unity are the classical arithmetic
/// sums, matching the closed forms for primes and prime powers; prime
/// power and coprime-product isometries hold.
pub fn check_cyclotomic_pairings(_cfg: &BatteryConfig) -> CheckReport {
    run_check("cyclotomic-pairings", || {
        for p in [3u64, 5, 7, 11] {
            let k = NumberFieldData::cyclotomic(p);
            let t2 = k.t2_gram()?;
            let d = (p - 1) as usize;
            for i in 0..d {
                for j in 0..d {
                    let expect = if i == j { qi(p as i64 - 1) } else { qi(-1) };
                    if t2.at(i, j) != &expect {
                        return Err(CheckFail::fail(format!("prime {p}: entry ({i},{j})")));
                    }
                }
            }
            // |disc| = p^(p-2).
            let mut pw = Z::from(1u8);
            for _ in 0..(p - 2) {
                pw *= Z::from(p);
            }
            if k.abs_disc()? != pw {
                return Err(CheckFail::fail(format!("prime {p}: determinant")));
            }
        }
        for (p, e) in [(2u64, 2u32), (2, 3), (3, 2), (3, 3)] {
            let n = p.pow(e);
            let k = NumberFieldData::cyclotomic(n);
            let t2 = k.t2_gram()?;
            let d = crate::arith::euler_phi(n) as usize;
            let lower = (n / p) as i64; // p^(e-1)
            for i in 0..d {
                for j in 0..d {
                    let v = (i as i64 - j as i64).rem_euclid(n as i64);
                    let expect = if v == 0 {
                        qi(n as i64 - lower)
                    } else if v % lower == 0 {
                        qi(-lower)
                    } else {
                        qi(0)
                    };
                    if t2.at(i, j) != &expect {
                        return Err(CheckFail::fail(format!("n={n}: entry ({i},{j})")));
                    }
                }
            }
            if !numberfield::epn_isometry_check(p, e) {
                return Err(CheckFail::fail(format!("prime-power isometry at {n}")));
            }
        }
        for (n1, n2) in [(3u64, 4u64), (3, 5)] {
            if !numberfield::n1n2_isometry_check(n1, n2) {
                return Err(CheckFail::fail(format!("coprime isometry at ({n1},{n2})")));
            }
        }
        Ok(json!({
            "primes": [3, 5, 7, 11],
            "prime_powers": [4, 8, 9, 27],
            "coprime_products": [12, 15],
        }))
    })
}

// ---------------------------------------------------------------------------
// 3. Permutohedral cells
// ---------------------------------------------------------------------------

/// With all Selling parameters equal the cell is a permutohedron:
/// `(n+1)!` chain vertices, matching the generic vertex enumeration in
/// low rank, with the classical covering radius in rank 2.
pub fn check_permutohedron_cells(cfg: &BatteryConfig) -> CheckReport {
    run_check("permutohedron-cells", || {
        for n in 2..=4usize {
            let params = SellingParams::uniform(n, qi(1));
            let verts = vfk::all_vertices_vfk(&params)?;
            if verts.len() != factorial(n + 1) {
                return Err(CheckFail::fail(format!(
                    "n={n}: {} chain vertices, expected {}",
                    verts.len(),
                    factorial(n + 1)
                )));
            }
            let mut dedup = verts.clone();
            dedup.dedup();
            if dedup.len() != verts.len() {
                return Err(CheckFail::fail(format!("n={n}: chain vertices collide")));
            }
            // Identity chain: coordinates k/(n+1).
            let chain = Chain::new((0..=n).collect(), n)?;
            let v = vfk::vertex_of_chain(&params, &chain)?;
            let expect: Vec<Q> = (1..=n)
                .map(|j| Q::new(zi(j as i64), zi((n + 1) as i64)))
                .collect();
            if v != expect {
                return Err(CheckFail::fail(format!("n={n}: identity-chain vertex")));
            }
            if n <= 3 {
                let e = vfk::lattice_from_selling(&params)?;
                let vd = voronoi::voronoi_data(&e, &cfg.opts)?;
                if vd.vertices != verts {
                    return Err(CheckFail::fail(format!(
                        "n={n}: chain vertices disagree with the generic enumeration"
                    )));
                }
            }
        }
        let hex = EuclideanLattice::new(QMat::from_int_rows(&[&[2, -1], &[-1, 2]]))?;
        let vd = voronoi::voronoi_data(&hex, &cfg.opts)?;
        if vd.covering_radius_sq != q(2, 3) {
            return Err(CheckFail::fail("hexagonal covering radius"));
        }
        Ok(json!({ "ranks": "2..=4", "vertices": [6, 24, 120] }))
    })
}

// ---------------------------------------------------------------------------
// 4. Transference bounds
// ---------------------------------------------------------------------------

/// For random lattices: `1/4 <= rho^2 lambda_1^2(dual) <= n^2/4`
/// exactly, and the covering density inequality
/// `n log rho + log v_n >= -deg`.
pub fn check_transference_bounds(cfg: &BatteryConfig) -> CheckReport {
    run_check("transference-bounds", || {
        let mut rng = gen::rng_from_seed(cfg.seed ^ 0x7472616e73);
        let mut tested = 0usize;
        for rank in 1..=4usize {
            // Vertex enumeration cost grows steeply with the rank; scale
            // the sweep down where each instance is expensive.
            let samples = match rank {
                1..=3 => cfg.samples,
                _ => (cfg.samples / 4).max(2),
            };
            for _ in 0..samples {
                let e = gen::random_lattice(&mut rng, rank);
                let vd = voronoi::voronoi_data(&e, &cfg.opts)?;
                let rho_sq = vd.covering_radius_sq.clone();
                let l1_dual = e.dual().lambda1_sq(&cfg.opts)?;
                let prod = qi(4) * rho_sq.clone() * l1_dual;
                if prod < qi(1) || prod > qi((rank * rank) as i64) {
                    return Err(CheckFail::fail(format!(
                        "rank {rank}: 4 rho^2 lambda1^2 = {prod} outside [1, {}]",
                        rank * rank
                    )));
                }
                if rank == 1 {
                    // Balls tile the line: the density inequality is the
                    // exact identity 4 rho^2 = det.
                    if qi(4) * rho_sq.clone() != e.gram().det() {
                        return Err(CheckFail::fail("rank 1: covering identity"));
                    }
                } else {
                    let deg = e.degree_exact();
                    let nq = q(rank as i64, 2);
                    prove_nonneg(
                        |b| {
                            ln_ball_volume(rank as u64, b)
                                .add(&ln_q(&rho_sq, b).scale(&nq))
                                .add(&deg.to_enc(b))
                        },
                        cfg.bits,
                        &format!("rank {rank}: covering density"),
                    )?;
                }
                tested += 1;
            }
        }
        Ok(json!({ "lattices": tested, "ranks": "1..=4" }))
    })
}

// ---------------------------------------------------------------------------
// 5. Size bound through the morphism lattice
// ---------------------------------------------------------------------------

/// Any class satisfies `4 dist^2 lambda_1^2(hom dual) <= (rkF rkG)^2` —
/// the exact form of `size <= udeg(dual hom) + log(rkF rkG / 2)`, i.e.
/// the covering-radius transference bound applied to the hom lattice.
pub fn check_hom_size_bound(cfg: &BatteryConfig) -> CheckReport {
    run_check("hom-size-bound", || {
        let mut rng = gen::rng_from_seed(cfg.seed ^ 0x686f6d);
        for i in 0..cfg.samples {
            let rf = 1 + (i % 2);
            let rg = 1 + ((i / 2) % 2);
            let f = gen::random_lattice(&mut rng, rf);
            let g = gen::random_lattice(&mut rng, rg);
            let t = gen::random_qmat(&mut rng, rg, rf, 8, 4);
            let c = ExtensionClass::new(f.clone(), g.clone(), t, &cfg.opts)?;
            let hom = hom_lattice(&f, &g);
            let l1 = hom.dual().lambda1_sq(&cfg.opts)?;
            let lhs = qi(4) * c.dist_sq().clone() * l1;
            let rhs = qi(((rf * rg) * (rf * rg)) as i64);
            if lhs > rhs {
                return Err(CheckFail::fail(format!(
                    "sample {i}: 4 dist^2 lambda1^2 = {lhs} > {rhs}"
                )));
            }
        }
        Ok(json!({ "classes": cfg.samples, "ranks": "1..=2 x 1..=2" }))
    })
}

// ---------------------------------------------------------------------------
// 6. Extensions over the projective line
// ---------------------------------------------------------------------------

/// Sweep of primitive points: two-sided size bounds, splitting exactly at
/// the two marked points, the tangency law for adjacent circles, and the
/// exact sizes `log n` along the standard sequence.
pub fn check_plane_extensions(cfg: &BatteryConfig) -> CheckReport {
    run_check("plane-extensions", || {
        let b = cfg.p1_bound;
        let mut points = 0usize;
        for a0 in 0i64..=b {
            for a1 in -b..=b {
                if (a0 == 0 && a1 == 0) || crate::arith::gcd_i64(a0, a1) != 1 || (a0 == 0 && a1 != 1) {
                    continue;
                }
                let p = ProjPoint::new(zi(a0), zi(a1))?;
                let split = p.is_split();
                if split != ((a0 == 1 && a1 == 0) || (a0 == 0 && a1 == 1)) {
                    return Err(CheckFail::fail(format!("({a0}:{a1}): split classification")));
                }
                match p.size_exact() {
                    None => {
                        if !split {
                            return Err(CheckFail::fail(format!("({a0}:{a1}): no size")));
                        }
                    }
                    Some(s) => {
                        if split {
                            return Err(CheckFail::fail(format!("({a0}:{a1}): split with size")));
                        }
                        if !p.size_lower_bound().le(&s) || !s.le(&p.size_upper_bound()) {
                            return Err(CheckFail::fail(format!("({a0}:{a1}): size bounds")));
                        }
                    }
                }
                if a0 != 0 && a1 != 0 {
                    let (al0, al1) = (a0.abs(), a1.abs());
                    let (_, x, y) = crate::arith::egcd_i64(al0, al1);
                    let c0 = CircleQ::from_rational(&q(-y, al0));
                    let c1 = CircleQ::from_rational(&q(x, al1));
                    let abscissa = ford_tangency(&c0, &c1)
                        .ok_or_else(|| CheckFail::fail("adjacent circles not tangent"))?;
                    let eps = if a0 * a1 > 0 { qi(1) } else { qi(-1) };
                    if !(abscissa - eps * p.s_class()).is_integer() {
                        return Err(CheckFail::fail(format!(
                            "({a0}:{a1}): tangency abscissa off the circle-map value"
                        )));
                    }
                }
                points += 1;
            }
        }
        for n in 1..=b {
            let p = ProjPoint::new(zi(1), zi(n))?;
            let s = p.size_exact().expect("not split");
            if s.cmp_exact(&ExactLn::ln(qi(n))) != std::cmp::Ordering::Equal {
                return Err(CheckFail::fail(format!("(1:{n}): size differs from log {n}")));
            }
        }
        Ok(json!({ "points": points, "coordinate_bound": b }))
    })
}

// ---------------------------------------------------------------------------
// 7. Reduction constants
// ---------------------------------------------------------------------------

/// Splittings from dual-reduced flags have slope defect within the sharp
/// bound, sum-map operator norms within the explicit constants, and the
/// one-step quotient obeys the factor-4 first-minimum bound with a small
/// connecting class.
pub fn check_reduction_constants(cfg: &BatteryConfig) -> CheckReport {
    run_check("reduction-constants", || {
        let mut rng = gen::rng_from_seed(cfg.seed ^ 0x726564756365);
        let mut tested = 0usize;
        for rank in 2..=5usize {
            let samples = if rank == 5 {
                cfg.samples / 2
            } else {
                cfg.samples
            };
            for _ in 0..samples.max(2) {
                let e = gen::random_lattice(&mut rng, rank);
                let flag = dual_reduced_flag(&e, &cfg.opts)?;
                let sp = split_flag(&e, &flag, &cfg.opts)?;
                let delta = delta_invariant(&e, sp.gens())?;
                if delta.signum() < 0 {
                    return Err(CheckFail::fail(format!("rank {rank}: negative defect")));
                }
                if !delta.le(&c_bound_tight(rank as u64)) {
                    return Err(CheckFail::fail(format!(
                        "rank {rank}: slope defect exceeds the sharp constant"
                    )));
                }
                let sig = sigma_norm_report(&sp, cfg.bits)?;
                if !sig.norm_le_rank || !sig.inv_le_simple_bound || !sig.inv_le_tight_bound {
                    return Err(CheckFail::fail(format!(
                        "rank {rank}: sum-map operator norm bound"
                    )));
                }
                let (v, quot) = step_quotient(&e, &cfg.opts)?;
                if e.norm_sq(&v) != e.lambda1_sq(&cfg.opts)? {
                    return Err(CheckFail::fail(format!("rank {rank}: step vector not minimal")));
                }
                if e.lambda1_sq(&cfg.opts)? > qi(4) * quot.lambda1_sq(&cfg.opts)? {
                    return Err(CheckFail::fail(format!(
                        "rank {rank}: first minimum more than quadrupled"
                    )));
                }
                let fl = reduction::reduced_flag(&e, &cfg.opts)?;
                let adm = AdmissibleExtension::new(e.clone(), fl.sub_basis(1).clone())?;
                let c = extension::class_of(&adm, &cfg.opts)?;
                if c.dist_sq() > &qi(((rank - 1) * (rank - 1)) as i64) {
                    return Err(CheckFail::fail(format!("rank {rank}: step class too large")));
                }
                tested += 1;
            }
        }
        Ok(json!({ "lattices": tested, "ranks": "2..=5" }))
    })
}

// ---------------------------------------------------------------------------
// 8. The scalar-extension criterion on classical lattices
// ---------------------------------------------------------------------------

/// The finite per-vertex criterion certifies invariance for cubic and
/// root lattices over small cyclotomic integer rings, with boundary
/// contacts counted exactly.
pub fn check_scalar_extension_criterion(cfg: &BatteryConfig) -> CheckReport {
    run_check("scalar-extension-criterion", || {
        let z1 = EuclideanLattice::standard(1);
        let z2 = EuclideanLattice::standard(2);
        let a2 = basechange::root_lattice(&RootLatticeName::A(2)).lattice;
        let a3 = basechange::root_lattice(&RootLatticeName::A(3)).lattice;
        let d4 = basechange::root_lattice(&RootLatticeName::D(4)).lattice;
        let lattices: Vec<(&str, &EuclideanLattice)> = vec![
            ("Z", &z1),
            ("Z2", &z2),
            ("A2", &a2),
            ("A3", &a3),
            ("D4", &d4),
        ];
        let mut detail = serde_json::Map::new();
        for n in [3u64, 4, 5] {
            let k = NumberFieldData::cyclotomic(n);
            for (name, e) in &lattices {
                if !cfg.heavy && e.rank() * k.degree() > 8 {
                    continue;
                }
                let cert = basechange::condition_p(e, &k, &cfg.opts)?;
                match cert.verdict {
                    basechange::Verdict::Holds { boundary_contacts } => {
                        detail.insert(
                            format!("{name}/cyclotomic-{n}"),
                            json!({
                                "vertices": cert.vertices_checked,
                                "betas": cert.betas_checked,
                                "contacts": boundary_contacts,
                            }),
                        );
                    }
                    basechange::Verdict::Fails { vertex, beta } => {
                        return Err(CheckFail::fail(format!(
                            "{name} over cyclotomic-{n}: violated at vertex {vertex:?}, beta {beta:?}"
                        )));
                    }
                }
            }
        }
        Ok(Value::Object(detail))
    })
}

// ---------------------------------------------------------------------------
// 9. Duality of classes and the splitting identity
// ---------------------------------------------------------------------------

/// Duality preserves the extension size exactly, and the minimal summed
/// squared splitting norm equals `rk E + dist^2`.
pub fn check_duality_and_splitting(cfg: &BatteryConfig) -> CheckReport {
    run_check("duality-and-splitting", || {
        let mut rng = gen::rng_from_seed(cfg.seed ^ 0x6475616c);
        let mut tested = 0usize;
        for i in 0..cfg.samples {
            let rank = 2 + (i % 2); // ambient rank 2 or 3
            let e = gen::random_lattice(&mut rng, rank);
            let krank = 1 + (i % (rank - 1));
            let u = gen::random_unimodular(&mut rng, rank, 10);
            let mut gbasis = ZMat::zeros(rank, krank);
            for r in 0..rank {
                for c in 0..krank {
                    gbasis.set(r, c, u.at(r, c).clone());
                }
            }
            let adm = AdmissibleExtension::new(e.clone(), gbasis)?;
            let c = extension::class_of(&adm, &cfg.opts)?;
            let cd = extension::class_of(&extension::dual_extension(&adm), &cfg.opts)?;
            if c.dist_sq() != cd.dist_sq() {
                return Err(CheckFail::fail(format!(
                    "sample {i}: dual size changed ({} vs {})",
                    c.dist_sq(),
                    cd.dist_sq()
                )));
            }
            let smin = extension::splitting_size_min(&adm, None, &cfg.opts)?;
            if smin != qi(rank as i64) + c.dist_sq().clone() {
                return Err(CheckFail::fail(format!(
                    "sample {i}: splitting minimum {} differs from rank + dist^2",
                    smin
                )));
            }
            tested += 1;
        }
        Ok(json!({ "extensions": tested, "ambient_ranks": "2..=3" }))
    })
}

// ---------------------------------------------------------------------------
// 10. Independent enumeration oracles
// ---------------------------------------------------------------------------

fn round_q(x: &Q) -> Z {
    (x.clone() + q(1, 2)).floor().to_integer()
}

/// Smallest nonnegative integer `k` with `k^2 >= x`.
fn ceil_sqrt_q(x: &Q) -> Z {
    if !x.is_positive() {
        return Z::zero();
    }
    let c = x.ceil().to_integer();
    let k = c.sqrt();
    if &k * &k < c {
        k + Z::from(1u8)
    } else {
        k
    }
}

/// Exhaustive boxed search for closest vectors, independent of the tree
/// enumeration: coordinates are bounded by `|x_i - t_i|^2 <= d^2 (G^-1)_ii`.
fn grid_cvp(gram: &QMat, target: &[Q]) -> (Q, Vec<Vec<Z>>) {
    let n = gram.nrows();
    let ginv = gram.inverse().expect("positive-definite");
    let x0: Vec<Q> = target.iter().map(|t| Q::from_integer(round_q(t))).collect();
    let diff0: Vec<Q> = x0.iter().zip(target).map(|(a, b)| a.clone() - b.clone()).collect();
    let d0 = gram_quad(gram, &diff0);
    let mut lo = Vec::with_capacity(n);
    let mut hi = Vec::with_capacity(n);
    for i in 0..n {
        let k = Q::from_integer(ceil_sqrt_q(&(d0.clone() * ginv.at(i, i).clone())));
        lo.push((target[i].clone() - k.clone()).ceil().to_integer().to_i64().unwrap());
        hi.push((target[i].clone() + k).floor().to_integer().to_i64().unwrap());
    }
    let mut best = d0;
    let mut mins: Vec<Vec<Z>> = Vec::new();
    let mut idx: Vec<i64> = lo.clone();
    loop {
        let xq: Vec<Q> = idx.iter().map(|&v| qi(v)).collect();
        let diff: Vec<Q> = xq.iter().zip(target).map(|(a, b)| a.clone() - b.clone()).collect();
        let d = gram_quad(gram, &diff);
        if d < best {
            best = d;
            mins.clear();
            mins.push(idx.iter().map(|&v| zi(v)).collect());
        } else if d == best {
            mins.push(idx.iter().map(|&v| zi(v)).collect());
        }
        // Odometer.
        let mut i = 0;
        loop {
            if i == n {
                mins.sort();
                mins.dedup();
                return (best, mins);
            }
            idx[i] += 1;
            if idx[i] <= hi[i] {
                break;
            }
            idx[i] = lo[i];
            i += 1;
        }
    }
}

/// Closest-vector enumeration against the boxed oracle, the exact maximal
/// slope against its closed-form derivation in low rank, and obtuse
/// superbases reconstruct the metric they were computed from.
pub fn check_enumeration_oracles(cfg: &BatteryConfig) -> CheckReport {
    run_check("enumeration-oracles", || {
        let mut rng = gen::rng_from_seed(cfg.seed ^ 0x6f7261636c65);
        let pairs = cfg.samples * 2;
        for i in 0..pairs {
            let rank = 1 + (i % 4);
            let e = gen::random_lattice(&mut rng, rank);
            let t = gen::random_point(&mut rng, rank, 6, 4);
            let cvp = enumerate::closest_vectors(e.gram(), &t, &cfg.opts)?;
            let (gmin, gvecs) = grid_cvp(e.gram(), &t);
            if cvp.min_norm != gmin || cvp.minimizers != gvecs {
                return Err(CheckFail::fail(format!(
                    "closest-vector mismatch at sample {i} (rank {rank})"
                )));
            }
        }
        // Maximal slope: tree search vs the closed forms
        // rank 2: max(-1/2 log l1, deg/2);
        // rank 3: max(-1/2 log l1, -1/4 log(det l1(dual)), deg/3).
        for i in 0..cfg.samples {
            let rank = 2 + (i % 2);
            let e = gen::random_lattice(&mut rng, rank);
            let got = mu_max(&e, &MuMaxMethod::Exact, &cfg.opts)?;
            if !got.certified_exact {
                return Err(CheckFail::fail(format!("slope not certified at sample {i}")));
            }
            let l1 = e.lambda1_sq(&cfg.opts)?;
            let mut cands = vec![
                ExactLn::mul_ln(q(-1, 2), l1),
                e.slope_exact()?,
            ];
            if rank == 3 {
                let ld = e.dual().lambda1_sq(&cfg.opts)?;
                cands.push(ExactLn::mul_ln(q(-1, 4), e.gram().det() * ld));
            }
            let formula = cands
                .into_iter()
                .max_by(|a, b| a.cmp_exact(b))
                .expect("nonempty");
            if got.value.cmp_exact(&formula) != std::cmp::Ordering::Equal {
                return Err(CheckFail::fail(format!(
                    "maximal slope differs from the closed form at sample {i} (rank {rank})"
                )));
            }
        }
        // Selling round trip + nonnegative base-change margins.
        let k3 = NumberFieldData::cyclotomic(3);
        let t2 = k3.t2_gram()?.clone();
        let trace = k3.trace_vector()?.to_vec();
        for i in 0..(cfg.samples * 2) {
            let rank = 1 + (i % 3);
            let e = gen::random_lattice(&mut rng, rank);
            let sd = vfk::obtuse_superbase(&e, 100_000)?;
            if sd.params.entries().values().any(|p| p.is_negative()) {
                return Err(CheckFail::fail(format!("negative Selling parameter at {i}")));
            }
            let mut m = ZMat::zeros(rank, rank);
            for r in 0..rank {
                for c in 0..rank {
                    m.set(r, c, sd.superbase.at(c + 1, r).clone());
                }
            }
            let det = m.det();
            if det != Z::from(1u8) && det != Z::from(-1i8) {
                return Err(CheckFail::fail(format!("superbase not a basis at {i}")));
            }
            let rebuilt = vfk::lattice_from_selling(&sd.params)?;
            if rebuilt.gram() != &e.gram().pullback(&m.to_qmat()) {
                return Err(CheckFail::fail(format!("Selling reconstruction at {i}")));
            }
            // Margin of the halfspace criterion under base change stays
            // nonnegative termwise for a random integral element tuple.
            let beta: Vec<Vec<Z>> = (0..=rank)
                .map(|_| (0..t2.nrows()).map(|_| zi(rng.gen_range(-2..=2))).collect())
                .collect();
            if vfk::base_change_margin(&sd.params, &t2, &trace, &beta).is_negative() {
                return Err(CheckFail::fail(format!("negative margin at {i}")));
            }
        }
        Ok(json!({
            "cvp_pairs": pairs,
            "slope_samples": cfg.samples,
            "selling_round_trips": cfg.samples * 2,
        }))
    })
}

// ---------------------------------------------------------------------------
// 11. Field invariants
// ---------------------------------------------------------------------------

/// Pairing determinants equal the absolute discriminant (against the
/// closed conductor formula), dualizing-module duality holds, unit-ball
/// margins are nonnegative, and the discriminant growth inequality
/// `log|disc|/d >= log d - 2 psi(d)` holds for small fields.
pub fn check_field_invariants(cfg: &BatteryConfig) -> CheckReport {
    run_check("field-invariants", || {
        // Closed form: |disc| = n^phi / prod_{p | n} p^(phi/(p-1)).
        for n in (1u64..=20).filter(|n| *n != 2) {
            let k = NumberFieldData::cyclotomic(n);
            let phi = crate::arith::euler_phi(n);
            let mut expect = Q::from_integer(Z::from(n)).pow(phi as i32);
            for (p, _) in crate::arith::factor(n) {
                expect /= Q::from_integer(Z::from(p)).pow((phi / (p - 1)) as i32);
            }
            if Q::from_integer(k.abs_disc()?) != expect {
                return Err(CheckFail::fail(format!("discriminant of cyclotomic {n}")));
            }
            if !numberfield::omega_duality_check(&k)? {
                return Err(CheckFail::fail(format!("duality failed for cyclotomic {n}")));
            }
        }
        let sqrt2 = NumberFieldData::totally_real(Poly::from_int_coeffs(&[-2, 0, 1]))?;
        if sqrt2.t2_gram()? != &QMat::from_int_rows(&[&[2, 0], &[0, 4]])
            || sqrt2.disc()? != &Z::from(8u8)
        {
            return Err(CheckFail::fail("trace pairing of the square root of 2"));
        }
        if !numberfield::omega_duality_check(&sqrt2)? {
            return Err(CheckFail::fail("duality failed for the square root of 2"));
        }
        for n in [3u64, 4, 5, 7, 9, 12] {
            let k = NumberFieldData::cyclotomic(n);
            let sweep = basechange::rank1_invariance(&k, &qi(8), &cfg.opts)?;
            if !sweep.all_nonnegative {
                return Err(CheckFail::fail(format!("negative margin over cyclotomic {n}")));
            }
        }
        // Discriminant growth in the degree.
        let cubic = NumberFieldData::totally_real(Poly::from_int_coeffs(&[1, -2, -1, 1]))?;
        let quintic =
            NumberFieldData::totally_real(Poly::from_int_coeffs(&[-1, 3, 3, -4, -1, 1]))?;
        let fields = [
            NumberFieldData::cyclotomic(3),
            NumberFieldData::cyclotomic(4),
            cubic,
            NumberFieldData::cyclotomic(5),
            quintic,
            NumberFieldData::cyclotomic(7),
            NumberFieldData::cyclotomic(9),
        ];
        for k in &fields {
            let d = k.degree() as u64;
            let absd = Q::from_integer(k.abs_disc()?);
            prove_nonneg(
                |b| {
                    ln_q(&absd, b)
                        .scale(&Q::new(Z::from(1u8), Z::from(d)))
                        .sub(&ln_q(&qi(d as i64), b))
                        .add(&psi_fn(d, b).scale(&qi(2)))
                },
                cfg.bits,
                &format!("discriminant growth at degree {d}"),
            )?;
        }
        Ok(json!({
            "cyclotomic_range": "1..=20",
            "degree_growth": [2, 2, 3, 4, 5, 6, 6],
        }))
    })
}

// ---------------------------------------------------------------------------
// 12. Base change of classes
// ---------------------------------------------------------------------------

/// Extending scalars never increases the squared size (`ext <= d dist^2`),
/// with equality whenever the cell-invariance criterion holds for the
/// morphism lattice; diagonal images obey the two-sided almost-invariance
/// brackets.
pub fn check_base_change_invariance(cfg: &BatteryConfig) -> CheckReport {
    run_check("base-change-invariance", || {
        let mut rng = gen::rng_from_seed(cfg.seed ^ 0x62617365);
        let k3 = NumberFieldData::cyclotomic(3);
        let k4 = NumberFieldData::cyclotomic(4);
        let mut equalities = 0usize;
        for i in 0..cfg.samples {
            let k = if i % 2 == 0 { &k3 } else { &k4 };
            let rf = 1 + (i % 2);
            let rg = 1 + ((i / 2) % 2);
            let f = gen::random_lattice(&mut rng, rf);
            let g = gen::random_lattice(&mut rng, rg);
            let t = gen::random_qmat(&mut rng, rg, rf, 6, 4);
            let c = ExtensionClass::new(f, g, t, &cfg.opts)?;
            let ext = extension::base_changed_dist_sq(&c, k, &cfg.opts)?;
            let scaled = qi(k.degree() as i64) * c.dist_sq().clone();
            if ext > scaled {
                return Err(CheckFail::fail(format!("sample {i}: size grew under base change")));
            }
            let rep = basechange::size_invariance_report(&c, k, &cfg.opts)?;
            if rep.condition_p.holds() {
                if !rep.equal_within_tolerance {
                    return Err(CheckFail::fail(format!(
                        "sample {i}: criterion holds but size moved"
                    )));
                }
                equalities += 1;
            }
        }
        // Two-sided almost-invariance brackets over the same named pairs as
        // the scalar-extension criterion, at random rational points.
        let z1 = EuclideanLattice::standard(1);
        let z2 = EuclideanLattice::standard(2);
        let a2 = basechange::root_lattice(&RootLatticeName::A(2)).lattice;
        let a3 = basechange::root_lattice(&RootLatticeName::A(3)).lattice;
        let d4 = basechange::root_lattice(&RootLatticeName::D(4)).lattice;
        let lattices: Vec<(&str, &EuclideanLattice)> =
            vec![("Z", &z1), ("Z2", &z2), ("A2", &a2), ("A3", &a3), ("D4", &d4)];
        let points_per_pair = (cfg.samples / 2).max(4);
        let mut brackets = 0usize;
        for n in [3u64, 4, 5] {
            let k = NumberFieldData::cyclotomic(n);
            for (name, e) in &lattices {
                if !cfg.heavy && e.rank() * k.degree() > 8 {
                    continue;
                }
                for _ in 0..points_per_pair {
                    let w = gen::random_point(&mut rng, e.rank(), 5, 6);
                    let ai = reduction::almost_invariance_check(e, &k, &w, &cfg.opts)?;
                    if !ai.lower_holds || !ai.upper_holds {
                        return Err(CheckFail::fail(format!(
                            "{name} over cyclotomic-{n}: bracket violated at {w:?}"
                        )));
                    }
                    brackets += 1;
                }
            }
        }
        Ok(json!({
            "classes": cfg.samples,
            "criterion_equalities": equalities,
            "bracket_samples": brackets,
        }))
    })
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

pub const CHECK_NAMES: [&str; 12] = [
    "quotient-family-sizes",
    "cyclotomic-pairings",
    "permutohedron-cells",
    "transference-bounds",
    "hom-size-bound",
    "plane-extensions",
    "reduction-constants",
    "scalar-extension-criterion",
    "duality-and-splitting",
    "enumeration-oracles",
    "field-invariants",
    "base-change-invariance",
];

pub fn run_named_check(name: &str, cfg: &BatteryConfig) -> Option<CheckReport> {
    let r = match name {
        "quotient-family-sizes" => check_quotient_family_sizes(cfg),
        "cyclotomic-pairings" => check_cyclotomic_pairings(cfg),
        "permutohedron-cells" => check_permutohedron_cells(cfg),
        "transference-bounds" => check_transference_bounds(cfg),
        "hom-size-bound" => check_hom_size_bound(cfg),
        "plane-extensions" => check_plane_extensions(cfg),
        "reduction-constants" => check_reduction_constants(cfg),
        "scalar-extension-criterion" => check_scalar_extension_criterion(cfg),
        "duality-and-splitting" => check_duality_and_splitting(cfg),
        "enumeration-oracles" => check_enumeration_oracles(cfg),
        "field-invariants" => check_field_invariants(cfg),
        "base-change-invariance" => check_base_change_invariance(cfg),
        _ => return None,
    };
    Some(r)
}

/// Run the full battery and aggregate into one report.
pub fn run_battery(cfg: &BatteryConfig) -> RunReport {
    let mut report = RunReport::new("verify-all");
    for name in CHECK_NAMES {
        let c = run_named_check(name, cfg).expect("every listed check exists");
        report.push(&c.name, c.status, c.detail);
    }
    report
}
