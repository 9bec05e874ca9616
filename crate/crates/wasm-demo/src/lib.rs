//! Browser bindings: thin JSON-in/JSON-out wrappers around the exact
//! kernel, sized so every call stays interactive. All numbers that the
//! page only draws are sent as floats; everything it displays as a value
//! is sent as an exact fraction string alongside.

use extlat::basechange;
use extlat::enumerate::EnumOpts;
use extlat::jsonio::{parse_gram, q_to_string};
use extlat::lattice::EuclideanLattice;
use extlat::numberfield::NumberFieldData;
use extlat::p1ext::{ford_tangency, CircleQ, ProjPoint};
use extlat::rational::{q_to_f64, Q, Z};
use extlat::voronoi;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Node budget small enough that no click can hang the page.
const DEMO_BUDGET: u64 = 5_000_000;

fn err(msg: impl std::fmt::Display) -> String {
    json!({ "error": msg.to_string() }).to_string()
}

fn q_f64_pair(x: &Q) -> Value {
    json!({ "exact": q_to_string(x), "approx": q_to_f64(x) })
}

/// Rank-2 lattice explorer: exact invariants plus an embedding of the
/// basis, the facet vectors and the cell vertices into drawing
/// coordinates.
#[wasm_bindgen]
pub fn voronoi_demo(gram_json: String) -> String {
    let gram = match parse_gram(&gram_json) {
        Ok(g) => g,
        Err(e) => return err(e),
    };
    if gram.nrows() != 2 {
        return err("the cell drawing needs a rank-2 Gram matrix");
    }
    let e = match EuclideanLattice::new(gram) {
        Ok(e) => e,
        Err(e) => return err(e),
    };
    let opts = EnumOpts::with_budget(DEMO_BUDGET);
    let vd = match voronoi::voronoi_data(&e, &opts) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    let l1 = match e.lambda1_sq(&opts) {
        Ok(v) => v,
        Err(e) => return err(e),
    };
    // Upper-triangular embedding: b0 -> (sqrt g00, 0), b1 -> (g01/sqrt g00, sqrt(det/g00)).
    let g00 = q_to_f64(e.gram().at(0, 0));
    let g01 = q_to_f64(e.gram().at(0, 1));
    let det = q_to_f64(&e.gram().det());
    let s = g00.sqrt();
    let emb = [[s, 0.0], [g01 / s, (det / g00).sqrt()]];
    let to_xy = |x: f64, y: f64| [x * emb[0][0] + y * emb[1][0], x * emb[0][1] + y * emb[1][1]];
    let relevant: Vec<Value> = vd
        .relevant
        .strict
        .iter()
        .chain(vd.relevant.weak.iter())
        .map(|v| {
            let (a, b) = (
                v[0].to_string().parse::<f64>().unwrap_or(0.0),
                v[1].to_string().parse::<f64>().unwrap_or(0.0),
            );
            json!({ "coords": [v[0].to_string(), v[1].to_string()], "xy": to_xy(a, b) })
        })
        .collect();
    let vertices: Vec<Value> = vd
        .vertices
        .iter()
        .map(|v| {
            json!({
                "coords": [q_to_string(&v[0]), q_to_string(&v[1])],
                "xy": to_xy(q_to_f64(&v[0]), q_to_f64(&v[1])),
                "norm_sq": q_f64_pair(&e.inner(v, v)),
            })
        })
        .collect();
    json!({
        "det": q_f64_pair(&e.gram().det()),
        "degree": serde_json::to_value(e.degree()).unwrap(),
        "lambda1_sq": q_f64_pair(&l1),
        "covering_radius_sq": q_f64_pair(&vd.covering_radius_sq),
        "basis_xy": emb,
        "relevant": relevant,
        "vertices": vertices,
    })
    .to_string()
}

fn circle_json(center: &Q, radius: &Q, label: String) -> Value {
    json!({
        "x": q_to_f64(center),
        "r": q_to_f64(radius),
        "exact_x": q_to_string(center),
        "label": label,
    })
}

/// The tangent-circle picture and the exact class data at one projective
/// point, plus the circle family up to a denominator bound for context.
#[wasm_bindgen]
pub fn p1_demo(a0: i64, a1: i64, max_den: u32) -> String {
    let p = match ProjPoint::new(Z::from(a0), Z::from(a1)) {
        Ok(p) => p,
        Err(e) => return err(e),
    };
    let mut family = Vec::new();
    for a in 1..=max_den.max(1) as i64 {
        for b in 0..=a {
            if extlat::arith::gcd_i64(a, b) == 1 {
                let x = Q::new(Z::from(b), Z::from(a));
                let r = Q::new(Z::from(1), Z::from(2 * a * a));
                family.push(circle_json(&x, &r, format!("{b}/{a}")));
            }
        }
    }
    let (pair, abscissa) = if p.is_split() {
        (Value::Null, Value::Null)
    } else {
        let al0 = a0.abs();
        let al1 = a1.abs();
        let (_, x, y) = extlat::arith::egcd_i64(al0, al1);
        let r0 = Q::new(Z::from(-y), Z::from(al0));
        let r1 = Q::new(Z::from(x), Z::from(al1));
        let c0 = CircleQ::from_rational(&r0);
        let c1 = CircleQ::from_rational(&r1);
        let t = ford_tangency(&c0, &c1);
        let mk = |r: &Q| {
            let den = r.denom().clone();
            let rad = Q::new(Z::from(1), Z::from(2) * &den * &den);
            circle_json(r, &rad, q_to_string(r))
        };
        (
            json!([mk(&r0), mk(&r1)]),
            t.map(|x| q_f64_pair(&x)).unwrap_or(Value::Null),
        )
    };
    json!({
        "point": format!("({} : {})", p.a0(), p.a1()),
        "split": p.is_split(),
        "height": serde_json::to_value(p.height()).unwrap(),
        "s_class": q_f64_pair(&p.s_class()),
        "size": serde_json::to_value(p.size()).unwrap(),
        "tangent_pair": pair,
        "tangency_abscissa": abscissa,
        "family": family,
    })
    .to_string()
}

/// Decide the scalar-extension criterion for a small Gram matrix over a
/// cyclotomic field, returning the full certificate.
#[wasm_bindgen]
pub fn bcheck_demo(gram_json: String, cyclo_n: u32) -> String {
    let gram = match parse_gram(&gram_json) {
        Ok(g) => g,
        Err(e) => return err(e),
    };
    if !(3..=16).contains(&cyclo_n) {
        return err("the cyclotomic level must be between 3 and 16");
    }
    let e = match EuclideanLattice::new(gram) {
        Ok(e) => e,
        Err(e) => return err(e),
    };
    let k = NumberFieldData::cyclotomic(cyclo_n as u64);
    if e.rank() * k.degree() > 12 {
        return err(format!(
            "instance too large for the page: rank x degree = {} > 12",
            e.rank() * k.degree()
        ));
    }
    let opts = EnumOpts::with_budget(DEMO_BUDGET);
    let cert = match basechange::condition_p(&e, &k, &opts) {
        Ok(c) => c,
        Err(e) => return err(e),
    };
    let verdict = match &cert.verdict {
        basechange::Verdict::Holds { boundary_contacts } => json!({
            "holds": true, "boundary_contacts": boundary_contacts,
        }),
        basechange::Verdict::Fails { vertex, beta } => json!({
            "holds": false,
            "vertex": vertex.iter().map(q_to_string).collect::<Vec<_>>(),
            "beta": beta.iter().map(|b| b.to_string()).collect::<Vec<_>>(),
        }),
    };
    json!({
        "field_degree": cert.field_degree,
        "radius_sq": q_f64_pair(&cert.radius_sq),
        "vertices_checked": cert.vertices_checked,
        "betas_checked": cert.betas_checked,
        "verdict": verdict,
    })
    .to_string()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn voronoi_demo_emits_hexagon_data() {
        let out = voronoi_demo("[[2,-1],[-1,2]]".into());
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
        assert_eq!(v["covering_radius_sq"]["exact"], "2/3");
    }

    #[test]
    fn p1_demo_reports_tangency() {
        let out = p1_demo(1, 2, 5);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["s_class"]["exact"], "2/5");
        assert_eq!(v["tangency_abscissa"]["exact"], "2/5");
        assert!(v["family"].as_array().unwrap().len() > 5);
    }

    #[test]
    fn bcheck_demo_certifies_the_small_case() {
        let out = bcheck_demo("[[1]]".into(), 3);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!(v.get("error").is_none(), "{out}");
        assert_eq!(v["verdict"]["holds"], true);
        assert_eq!(v["betas_checked"], 6);
        let big = bcheck_demo("[[2,-1],[-1,2]]".into(), 16);
        let v: Value = serde_json::from_str(&big).unwrap();
        assert!(v.get("error").is_some());
    }
}
