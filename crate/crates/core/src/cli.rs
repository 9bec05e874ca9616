//! Command-line interface: every operation prints one JSON document to
//! stdout (exact rationals as fraction strings, logarithmic values with
//! explicit error bounds) and is deterministic for a fixed argument
//! vector and seed. Exit codes: 0 success, 1 a requested verification
//! failed, 2 usage or input error.

use crate::basechange::{self, RootLatticeName, Verdict};
use crate::battery::{self, BatteryConfig};
use crate::enclosure::precision_bits;
use crate::enumerate::EnumOpts;
use crate::extension::{self, AdmissibleExtension, ExtensionClass};
use crate::jsonio::{
    self, enc_json, field_json, parse_field, parse_gram, parse_point, parse_qmat, parse_zmat,
    q_json, qmat_json, qvec_json, zmat_json, zvec_json, CheckStatus, SCHEMA_VERSION,
};
use crate::lattice::{mu_max, EuclideanLattice, MuMaxMethod};
use crate::numberfield;
use crate::p1ext::{ford_tangency, CircleQ, ProjPoint};
use crate::rational::{Q, Z};
use crate::reduction::{
    c_bound_simple, c_bound_tight, delta_invariant, dual_reduced_flag, sigma_norm_report,
    split_flag,
};
use crate::vfk::{self, SellingParams};
use crate::voronoi;
use clap::{Args, Parser, Subcommand};
use num_traits::Signed;
use serde_json::{json, Map, Value};
use std::collections::BTreeMap;
use std::io::Write;

#[derive(Parser)]
#[command(
    name = "extlat",
    version,
    about = "Exact invariants of Euclidean lattices and their arithmetic extensions",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Pretty-print the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    /// Node budget for exact enumerations.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Degree, slopes and minima of a lattice given by its Gram matrix.
    Lattice(GramArg),
    /// Voronoi-relevant vectors, cell vertices and the covering radius.
    Voronoi(GramArg),
    /// Obtuse superbases, Selling parameters and cell combinatorics.
    #[command(subcommand)]
    Vfk(VfkCmd),
    /// Hermitian data of a number field.
    Field {
        /// rational | cyclotomic:N | minpoly:[c0,..,1] | general:[c0,..,1]
        #[arg(long)]
        field: String,
    },
    /// Extension classes: sizes, sums, bounds, duality, splittings.
    #[command(subcommand)]
    Ext(ExtCmd),
    /// Rank-two extensions over the projective line and tangent circles.
    #[command(subcommand)]
    P1(P1Cmd),
    /// Reduced flags, induced splittings and the explicit constants.
    Reduce(GramArg),
    /// Decide the scalar-extension criterion with an exact certificate.
    Bcheck {
        /// Gram matrix of the lattice (rows as JSON).
        #[arg(long, conflicts_with = "root")]
        gram: Option<String>,
        /// Named root lattice (A2, A3, D4, E6, E7, E8); orbit-reduced check.
        #[arg(long)]
        root: Option<String>,
        /// Field spec, e.g. cyclotomic:5.
        #[arg(long)]
        field: String,
    },
    /// Run the verification battery and report one line per check.
    VerifyAll {
        /// Scale for the random sweeps (default: quick interactive size).
        #[arg(long)]
        samples: Option<usize>,
        /// Coordinate bound for the projective-line sweeps.
        #[arg(long)]
        p1_bound: Option<i64>,
        /// Include the largest scalar-extension instances.
        #[arg(long)]
        heavy: bool,
        /// Seed for the random sweeps.
        #[arg(long, default_value_t = crate::gen::DEFAULT_SEED)]
        seed: u64,
        /// Run a single named check instead of all twelve.
        #[arg(long)]
        check: Option<String>,
    },
}

#[derive(Args)]
struct GramArg {
    /// Gram matrix rows as JSON, e.g. [[2,-1],[-1,2]].
    #[arg(long)]
    gram: String,
}

#[derive(Subcommand)]
enum VfkCmd {
    /// Flip a basis into an obtuse superbase and report Selling parameters.
    Superbase {
        #[arg(long)]
        gram: String,
        /// Maximum number of flips before giving up.
        #[arg(long, default_value_t = 100_000)]
        max_flips: usize,
    },
    /// All cell vertices from strictly obtuse Selling parameters.
    Vertices {
        /// Selling parameters as JSON: {"n":2,"p":{"0,1":"1","0,2":"1","1,2":"1"}}.
        #[arg(long, conflicts_with = "gram")]
        params: Option<String>,
        /// Or a Gram matrix; a superbase is computed first.
        #[arg(long)]
        gram: Option<String>,
    },
    /// Base-change margin of the halfspace criterion for given ring elements.
    Margin {
        #[arg(long)]
        params: String,
        #[arg(long)]
        field: String,
        /// n+1 integral elements in the field basis: [[..],[..],..].
        #[arg(long)]
        beta: String,
    },
}

#[derive(Subcommand)]
enum ExtCmd {
    /// Canonical representative and size of a class given by a matrix.
    Size(ClassArgs),
    /// Sum of two classes of the same pair of lattices.
    Sum {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        t1: String,
        #[arg(long)]
        t2: String,
    },
    /// Maximal size over all classes of the pair (squared covering radius).
    Bounds(PairArgs),
    /// Dual of an admissible quotient presentation; sizes must agree.
    Dual(AdmArgs),
    /// Minimal summed squared splitting norm of an admissible presentation.
    Split(AdmArgs),
}

#[derive(Args)]
struct PairArgs {
    /// Gram matrix of the quotient lattice F.
    #[arg(long)]
    f_gram: String,
    /// Gram matrix of the sub lattice G.
    #[arg(long)]
    g_gram: String,
}

#[derive(Args)]
struct ClassArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Class representative: rkG x rkF matrix rows as JSON.
    #[arg(long)]
    t: String,
}

#[derive(Args)]
struct AdmArgs {
    /// Gram matrix of the ambient lattice E.
    #[arg(long)]
    gram: String,
    /// Columns of a saturated sublattice basis, given as matrix rows.
    #[arg(long)]
    sub: String,
}

#[derive(Subcommand)]
enum P1Cmd {
    /// Height, circle-map value and size of the class at (a0 : a1).
    Size {
        /// The point as [a0, a1].
        #[arg(long)]
        point: String,
    },
    /// Tangency of the circles over two rationals (or "inf").
    Ford {
        #[arg(long)]
        c0: String,
        #[arg(long)]
        c1: String,
    },
    /// Table of the standard family (1 : n) for n = 1..=max.
    Scan {
        #[arg(long, default_value_t = 50)]
        max: i64,
    },
}

/// Internal error carrying the exit code (2 for usage/input problems).
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> CliError {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError {
            code: 2,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(Value, i32), CliError>;

fn finish(v: Value) -> CmdResult {
    Ok((v, 0))
}

fn with_schema(mut m: Map<String, Value>) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA_VERSION));
    out.append(&mut m);
    Value::Object(out)
}

fn obj(entries: Vec<(&str, Value)>) -> Value {
    let mut m = Map::new();
    for (k, v) in entries {
        m.insert(k.to_string(), v);
    }
    with_schema(m)
}

// ---------------------------------------------------------------------------
// Command bodies
// ---------------------------------------------------------------------------

fn cmd_lattice(gram: &str, opts: &EnumOpts) -> CmdResult {
    let e = EuclideanLattice::new(parse_gram(gram)?)?;
    let l1 = e.lambda1_sq(opts)?;
    let kissing = e.minimal_vectors(opts)?;
    let mut entries = vec![
        ("gram", qmat_json(e.gram())),
        ("rank", json!(e.rank())),
        ("det", q_json(&e.gram().det())),
        ("degree", serde_json::to_value(e.degree()).unwrap()),
        (
            "slope",
            serde_json::to_value(e.slope_exact()?.to_logvalue(precision_bits())).unwrap(),
        ),
        ("lambda1_sq", q_json(&l1)),
        ("udeg", serde_json::to_value(e.udeg(opts)?).unwrap()),
        ("kissing", json!(kissing.len())),
        (
            "minimal_vectors",
            Value::Array(kissing.iter().map(|v| zvec_json(v)).collect()),
        ),
        ("dual_gram", qmat_json(e.dual().gram())),
    ];
    if e.rank() <= 3 {
        let mm = mu_max(&e, &MuMaxMethod::Exact, opts)?;
        entries.push(("mu_max", serde_json::to_value(mm.to_logvalue()).unwrap()));
        entries.push(("mu_max_witness", zmat_json(&mm.witness)));
    }
    finish(obj(entries))
}

fn cmd_voronoi(gram: &str, opts: &EnumOpts) -> CmdResult {
    let e = EuclideanLattice::new(parse_gram(gram)?)?;
    let vd = voronoi::voronoi_data(&e, opts)?;
    finish(obj(vec![
        ("gram", qmat_json(e.gram())),
        (
            "relevant_strict",
            Value::Array(vd.relevant.strict.iter().map(|v| zvec_json(v)).collect()),
        ),
        (
            "relevant_weak",
            Value::Array(vd.relevant.weak.iter().map(|v| zvec_json(v)).collect()),
        ),
        (
            "vertices",
            Value::Array(vd.vertices.iter().map(|v| qvec_json(v)).collect()),
        ),
        ("vertex_count", json!(vd.vertices.len())),
        ("covering_radius_sq", q_json(&vd.covering_radius_sq)),
    ]))
}

fn params_json(p: &SellingParams) -> Value {
    let mut m = Map::new();
    for (&(i, j), v) in p.entries() {
        m.insert(format!("{i},{j}"), q_json(v));
    }
    json!({ "n": p.n(), "p": Value::Object(m) })
}

fn parse_params(text: &str) -> Result<SellingParams, CliError> {
    let v: Value =
        serde_json::from_str(text).map_err(|e| CliError::usage(format!("bad params: {e}")))?;
    let n = v
        .get("n")
        .and_then(Value::as_u64)
        .ok_or_else(|| CliError::usage("params need an integer \"n\""))? as usize;
    let pm = v
        .get("p")
        .and_then(Value::as_object)
        .ok_or_else(|| CliError::usage("params need an object \"p\""))?;
    let mut map = BTreeMap::new();
    for (k, val) in pm {
        let (i, j) = k
            .split_once(',')
            .ok_or_else(|| CliError::usage(format!("bad index pair {k:?}")))?;
        let i: usize = i.trim().parse().map_err(|_| CliError::usage("bad index"))?;
        let j: usize = j.trim().parse().map_err(|_| CliError::usage("bad index"))?;
        map.insert((i.min(j), i.max(j)), jsonio::json_to_q(val)?);
    }
    Ok(SellingParams::new(n, map)?)
}

fn cmd_vfk(cmd: &VfkCmd, _opts: &EnumOpts) -> CmdResult {
    match cmd {
        VfkCmd::Superbase { gram, max_flips } => {
            let e = EuclideanLattice::new(parse_gram(gram)?)?;
            let sd = vfk::obtuse_superbase(&e, *max_flips)?;
            finish(obj(vec![
                ("gram", qmat_json(e.gram())),
                ("params", params_json(&sd.params)),
                ("superbase", zmat_json(&sd.superbase)),
                ("strict", json!(sd.params.is_strict())),
            ]))
        }
        VfkCmd::Vertices { params, gram } => {
            let p = match (params, gram) {
                (Some(ptext), _) => parse_params(ptext)?,
                (None, Some(gtext)) => {
                    let e = EuclideanLattice::new(parse_gram(gtext)?)?;
                    vfk::obtuse_superbase(&e, 100_000)?.params
                }
                (None, None) => return Err(CliError::usage("need --params or --gram")),
            };
            let verts = vfk::all_vertices_vfk(&p)?;
            finish(obj(vec![
                ("params", params_json(&p)),
                (
                    "vertices",
                    Value::Array(verts.iter().map(|v| qvec_json(v)).collect()),
                ),
                ("vertex_count", json!(verts.len())),
            ]))
        }
        VfkCmd::Margin {
            params,
            field,
            beta,
        } => {
            let p = parse_params(params)?;
            let k = parse_field(field)?;
            let b = parse_zmat(beta)?;
            if b.nrows() != p.n() + 1 || b.ncols() != k.degree() {
                return Err(CliError::usage(format!(
                    "beta must be {} rows x {} columns",
                    p.n() + 1,
                    k.degree()
                )));
            }
            let rows: Vec<Vec<Z>> = (0..b.nrows())
                .map(|i| (0..b.ncols()).map(|j| b.at(i, j).clone()).collect())
                .collect();
            let m = vfk::base_change_margin(&p, k.t2_gram()?, k.trace_vector()?, &rows);
            let nonneg = !m.is_negative();
            Ok((
                obj(vec![
                    ("params", params_json(&p)),
                    ("field", field_json(&k)),
                    ("margin", q_json(&m)),
                    ("nonnegative", json!(nonneg)),
                ]),
                if nonneg { 0 } else { 1 },
            ))
        }
    }
}

fn cmd_field(field: &str) -> CmdResult {
    let k = parse_field(field)?;
    let mut entries = vec![
        ("field", field_json(&k)),
        ("degree", json!(k.degree())),
        ("minpoly", qvec_json(&k.minpoly().0)),
    ];
    if k.is_exact() {
        entries.push(("t2", qmat_json(k.t2_gram()?)));
        entries.push(("trace", qvec_json(k.trace_vector()?)));
        entries.push(("disc", jsonio::z_json(k.disc()?)));
        entries.push(("abs_disc", jsonio::z_json(&k.abs_disc()?)));
        let mk = numberfield::minkowski_lattice(&k)?;
        entries.push((
            "minkowski_degree",
            serde_json::to_value(mk.degree()).unwrap(),
        ));
    } else {
        entries.push(("exact", json!(false)));
    }
    finish(obj(entries))
}

fn class_json(c: &ExtensionClass) -> Vec<(&'static str, Value)> {
    vec![
        ("f_gram", qmat_json(c.f().gram())),
        ("g_gram", qmat_json(c.g().gram())),
        ("t", qmat_json(c.t())),
        ("dist_sq", q_json(c.dist_sq())),
        ("split", json!(c.is_zero())),
        ("size", serde_json::to_value(c.size()).unwrap()),
    ]
}

fn parse_pair(pair: &PairArgs) -> Result<(EuclideanLattice, EuclideanLattice), CliError> {
    Ok((
        EuclideanLattice::new(parse_gram(&pair.f_gram)?)?,
        EuclideanLattice::new(parse_gram(&pair.g_gram)?)?,
    ))
}

fn parse_adm(a: &AdmArgs) -> Result<AdmissibleExtension, CliError> {
    let e = EuclideanLattice::new(parse_gram(&a.gram)?)?;
    let sub = parse_zmat(&a.sub)?;
    Ok(AdmissibleExtension::new(e, sub)?)
}

fn cmd_ext(cmd: &ExtCmd, opts: &EnumOpts) -> CmdResult {
    match cmd {
        ExtCmd::Size(args) => {
            let (f, g) = parse_pair(&args.pair)?;
            let t = parse_qmat(&args.t)?;
            if t.nrows() != g.rank() || t.ncols() != f.rank() {
                return Err(CliError::usage(format!(
                    "t must be {} rows x {} columns",
                    g.rank(),
                    f.rank()
                )));
            }
            let c = ExtensionClass::new(f, g, t, opts)?;
            finish(obj(class_json(&c)))
        }
        ExtCmd::Sum { pair, t1, t2 } => {
            let (f, g) = parse_pair(pair)?;
            let c1 = ExtensionClass::new(f.clone(), g.clone(), parse_qmat(t1)?, opts)?;
            let c2 = ExtensionClass::new(f, g, parse_qmat(t2)?, opts)?;
            let s = c1.baer_sum(&c2, opts)?;
            let mut entries = class_json(&s);
            entries.push(("t1", qmat_json(c1.t())));
            entries.push(("t2", qmat_json(c2.t())));
            finish(obj(entries))
        }
        ExtCmd::Bounds(pair) => {
            let (f, g) = parse_pair(pair)?;
            let ms = extension::max_size_sq(&f, &g, opts)?;
            finish(obj(vec![
                ("f_gram", qmat_json(f.gram())),
                ("g_gram", qmat_json(g.gram())),
                ("max_dist_sq", q_json(&ms)),
                (
                    "max_size",
                    serde_json::to_value(extension::max_size(&f, &g, opts)?).unwrap(),
                ),
            ]))
        }
        ExtCmd::Dual(a) => {
            let adm = parse_adm(a)?;
            let c = extension::class_of(&adm, opts)?;
            let cd = extension::class_of(&extension::dual_extension(&adm), opts)?;
            let mut entries = class_json(&c);
            entries.push(("dual_dist_sq", q_json(cd.dist_sq())));
            entries.push(("sizes_agree", json!(c.dist_sq() == cd.dist_sq())));
            finish(obj(entries))
        }
        ExtCmd::Split(a) => {
            let adm = parse_adm(a)?;
            let c = extension::class_of(&adm, opts)?;
            let smin = extension::splitting_size_min(&adm, None, opts)?;
            let mut entries = class_json(&c);
            entries.push(("splitting_norm_sq_min", q_json(&smin)));
            entries.push((
                "identity_holds",
                json!(smin == Q::from_integer(Z::from(adm.e().rank() as u64)) + c.dist_sq().clone()),
            ));
            finish(obj(entries))
        }
    }
}

fn parse_circle(text: &str) -> Result<CircleQ, CliError> {
    let t = text.trim();
    if t.eq_ignore_ascii_case("inf") {
        return Ok(CircleQ::infinity());
    }
    Ok(CircleQ::from_rational(&jsonio::q_from_str(t)?))
}

fn proj_json(p: &ProjPoint) -> Vec<(&'static str, Value)> {
    let mut entries = vec![
        ("point", json!(format!("{}:{}", p.a0(), p.a1()))),
        ("height", serde_json::to_value(p.height()).unwrap()),
        ("split", json!(p.is_split())),
        ("s_class", q_json(&p.s_class())),
        ("size", serde_json::to_value(p.size()).unwrap()),
    ];
    entries.push((
        "size_lower_bound",
        serde_json::to_value(p.size_lower_bound().to_logvalue(precision_bits())).unwrap(),
    ));
    entries.push((
        "size_upper_bound",
        serde_json::to_value(p.size_upper_bound().to_logvalue(precision_bits())).unwrap(),
    ));
    entries
}

fn cmd_p1(cmd: &P1Cmd) -> CmdResult {
    match cmd {
        P1Cmd::Size { point } => {
            let v = parse_point(point)?;
            if v.len() != 2 || v.iter().any(|x| !x.is_integer()) {
                return Err(CliError::usage("point must be two integers [a0, a1]"));
            }
            let p = ProjPoint::new(v[0].to_integer(), v[1].to_integer())?;
            finish(obj(proj_json(&p)))
        }
        P1Cmd::Ford { c0, c1 } => {
            let a = parse_circle(c0)?;
            let b = parse_circle(c1)?;
            if a == b {
                return Err(CliError::usage("the two circles must differ"));
            }
            let t = ford_tangency(&a, &b);
            finish(obj(vec![
                ("tangent", json!(t.is_some())),
                (
                    "abscissa",
                    t.map(|x| q_json(&x)).unwrap_or(Value::Null),
                ),
            ]))
        }
        P1Cmd::Scan { max } => {
            if *max < 1 {
                return Err(CliError::usage("--max must be at least 1"));
            }
            let mut rows = Vec::new();
            for n in 1..=*max {
                let p = ProjPoint::new(Z::from(1u8), Z::from(n))?;
                let mut m = Map::new();
                for (k, v) in proj_json(&p) {
                    m.insert(k.to_string(), v);
                }
                rows.push(Value::Object(m));
            }
            finish(obj(vec![("rows", Value::Array(rows)), ("max", json!(max))]))
        }
    }
}

fn cmd_reduce(gram: &str, opts: &EnumOpts) -> CmdResult {
    let e = EuclideanLattice::new(parse_gram(gram)?)?;
    let n = e.rank() as u64;
    let flag = dual_reduced_flag(&e, opts)?;
    let sp = split_flag(&e, &flag, opts)?;
    let delta = delta_invariant(&e, sp.gens())?;
    let bits = precision_bits();
    let tight = c_bound_tight(n);
    let within = delta.signum() >= 0 && delta.le(&tight);
    let sig = sigma_norm_report(&sp, bits)?;
    let all_hold =
        within && sig.norm_le_rank && sig.inv_le_simple_bound && sig.inv_le_tight_bound;
    let flag_bases: Vec<Value> = (1..=e.rank()).map(|i| zmat_json(flag.sub_basis(i))).collect();
    let degrees: Vec<Value> = sp
        .line_degrees()
        .into_iter()
        .map(|d| serde_json::to_value(d.to_logvalue(bits)).unwrap())
        .collect();
    Ok((
        obj(vec![
            ("gram", qmat_json(e.gram())),
            ("flag", Value::Array(flag_bases)),
            ("generators", zmat_json(sp.gens())),
            ("line_degrees", Value::Array(degrees)),
            (
                "delta",
                serde_json::to_value(delta.to_logvalue(bits)).unwrap(),
            ),
            (
                "c_tight",
                serde_json::to_value(tight.to_logvalue(bits)).unwrap(),
            ),
            (
                "c_simple",
                serde_json::to_value(c_bound_simple(n).to_logvalue(bits)).unwrap(),
            ),
            ("sum_norm_sq", enc_json(&sig.norm_sq)),
            ("sum_inv_norm_sq", enc_json(&sig.inv_norm_sq)),
            ("all_bounds_hold", json!(all_hold)),
        ]),
        if all_hold { 0 } else { 1 },
    ))
}

fn parse_root(name: &str) -> Result<RootLatticeName, CliError> {
    let t = name.trim().to_ascii_uppercase();
    if t == "E6" {
        return Ok(RootLatticeName::E6);
    }
    if t == "E7" {
        return Ok(RootLatticeName::E7);
    }
    if t == "E8" {
        return Ok(RootLatticeName::E8);
    }
    if let Some(rest) = t.strip_prefix('A') {
        let n: usize = rest.parse().map_err(|_| CliError::usage("bad root name"))?;
        if n >= 1 {
            return Ok(RootLatticeName::A(n));
        }
    }
    if let Some(rest) = t.strip_prefix('D') {
        let n: usize = rest.parse().map_err(|_| CliError::usage("bad root name"))?;
        if n >= 2 {
            return Ok(RootLatticeName::D(n));
        }
    }
    Err(CliError::usage(format!(
        "unknown root lattice {name:?}: use A<n>, D<n>, E6, E7 or E8"
    )))
}

fn verdict_json(v: &Verdict) -> Value {
    match v {
        Verdict::Holds { boundary_contacts } => json!({
            "holds": true,
            "boundary_contacts": boundary_contacts,
        }),
        Verdict::Fails { vertex, beta } => json!({
            "holds": false,
            "vertex": qvec_json(vertex),
            "beta": zvec_json(beta),
        }),
    }
}

fn cmd_bcheck(
    gram: &Option<String>,
    root: &Option<String>,
    field: &str,
    opts: &EnumOpts,
) -> CmdResult {
    let k = parse_field(field)?;
    let (label, cert) = match (gram, root) {
        (Some(g), None) => {
            let e = EuclideanLattice::new(parse_gram(g)?)?;
            ("gram".to_string(), basechange::condition_p(&e, &k, opts)?)
        }
        (None, Some(r)) => {
            let name = parse_root(r)?;
            let model = basechange::root_lattice(&name);
            (
                format!("{name}"),
                basechange::condition_p_orbit(&model, &k, opts)?,
            )
        }
        _ => return Err(CliError::usage("need exactly one of --gram or --root")),
    };
    let holds = cert.verdict.holds();
    Ok((
        obj(vec![
            ("lattice", json!(label)),
            ("gram", qmat_json(&cert.gram)),
            ("field", field_json(&k)),
            ("field_degree", json!(cert.field_degree)),
            ("radius_sq", q_json(&cert.radius_sq)),
            ("vertices_checked", json!(cert.vertices_checked)),
            ("betas_checked", json!(cert.betas_checked)),
            ("verdict", verdict_json(&cert.verdict)),
        ]),
        if holds { 0 } else { 1 },
    ))
}

fn cmd_verify_all(
    samples: Option<usize>,
    p1_bound: Option<i64>,
    heavy: bool,
    seed: u64,
    check: &Option<String>,
    opts: &EnumOpts,
    err: &mut dyn Write,
) -> CmdResult {
    let mut cfg = BatteryConfig::quick();
    cfg.seed = seed;
    cfg.opts = opts.clone();
    if let Some(s) = samples {
        cfg.samples = s;
    }
    if let Some(b) = p1_bound {
        cfg.p1_bound = b;
    }
    if heavy {
        cfg.heavy = true;
    }
    let report = match check {
        Some(name) => {
            let c = battery::run_named_check(name, &cfg).ok_or_else(|| {
                CliError::usage(format!(
                    "unknown check {name:?}; available: {}",
                    battery::CHECK_NAMES.join(", ")
                ))
            })?;
            let mut r = jsonio::RunReport::new("verify-all");
            r.push(&c.name, c.status, c.detail);
            r
        }
        None => battery::run_battery(&cfg),
    };
    for c in &report.checks {
        let tag = match c.status {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Undecided => "undecided",
        };
        let _ = writeln!(err, "{tag:<10} {}", c.name);
    }
    let code = if report.passed() { 0 } else { 1 };
    Ok((serde_json::to_value(&report).unwrap(), code))
}

// ---------------------------------------------------------------------------
// Entry points
// ---------------------------------------------------------------------------

/// Run with explicit arguments and output streams; returns the exit code.
pub fn run_with_args<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // Help and version requests are successes by convention.
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return 2;
            }
            let _ = write!(out, "{e}");
            return 0;
        }
    };
    let opts = cli
        .budget
        .map(EnumOpts::with_budget)
        .unwrap_or_default();
    let result = match &cli.cmd {
        Cmd::Lattice(g) => cmd_lattice(&g.gram, &opts),
        Cmd::Voronoi(g) => cmd_voronoi(&g.gram, &opts),
        Cmd::Vfk(sub) => cmd_vfk(sub, &opts),
        Cmd::Field { field } => cmd_field(field),
        Cmd::Ext(sub) => cmd_ext(sub, &opts),
        Cmd::P1(sub) => cmd_p1(sub),
        Cmd::Reduce(g) => cmd_reduce(&g.gram, &opts),
        Cmd::Bcheck { gram, root, field } => cmd_bcheck(gram, root, field, &opts),
        Cmd::VerifyAll {
            samples,
            p1_bound,
            heavy,
            seed,
            check,
        } => cmd_verify_all(*samples, *p1_bound, *heavy, *seed, check, &opts, err),
    };
    match result {
        Ok((value, code)) => {
            let _ = writeln!(out, "{}", jsonio::to_json_string(&value, cli.pretty));
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {}", e.message);
            e.code
        }
    }
}

/// Process entry point: real argv, stdout and stderr.
pub fn run() -> i32 {
    let mut out = std::io::stdout().lock();
    let mut err = std::io::stderr().lock();
    run_with_args(std::env::args_os(), &mut out, &mut err)
}
