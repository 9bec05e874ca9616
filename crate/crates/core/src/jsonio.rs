//! JSON conventions shared by the command-line interface and the check
//! battery. Exact rationals and integers travel as reduced fraction
//! strings ("3", "-1/2") so no precision is lost; logarithmic quantities
//! travel as `{"value", "abs_error"}` pairs produced by the enclosure
//! layer. Input parsers accept JSON integers or fraction strings.

use crate::linalg::QMat;
use crate::numberfield::{FieldKind, NumberFieldData};
use crate::poly::Poly;
use crate::rational::{Q, Z};
use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed JSON: {0}")]
    Syntax(String),
    #[error("bad number {0:?}: use integers or \"p/q\" fraction strings")]
    BadNumber(String),
    #[error("bad shape: {0}")]
    BadShape(String),
    #[error("bad field spec {0:?}: use rational, cyclotomic:N, minpoly:[c0,..,1] or general:[c0,..,1]")]
    BadFieldSpec(String),
    #[error(transparent)]
    Field(#[from] crate::numberfield::FieldError),
}

// ---------------------------------------------------------------------------
// Exact scalars
// ---------------------------------------------------------------------------

/// Reduced fraction string: "p" when integral, else "p/q" with `q > 0`.
pub fn q_to_string(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn q_from_str(s: &str) -> Result<Q, JsonError> {
    let t = s.trim();
    let bad = || JsonError::BadNumber(s.to_string());
    match t.split_once('/') {
        None => Ok(Q::from_integer(Z::from_str(t).map_err(|_| bad())?)),
        Some((n, d)) => {
            let num = Z::from_str(n.trim()).map_err(|_| bad())?;
            let den = Z::from_str(d.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            Ok(Q::new(num, den))
        }
    }
}

/// Exact scalar from a JSON value: an integer number or a fraction string.
/// Floating-point literals are rejected to keep the interface exact.
pub fn json_to_q(v: &Value) -> Result<Q, JsonError> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Q::from_integer(Z::from(i)))
            } else if let Some(u) = n.as_u64() {
                Ok(Q::from_integer(Z::from(u)))
            } else {
                Err(JsonError::BadNumber(n.to_string()))
            }
        }
        Value::String(s) => q_from_str(s),
        other => Err(JsonError::BadNumber(other.to_string())),
    }
}

pub fn json_to_z(v: &Value) -> Result<Z, JsonError> {
    let q = json_to_q(v)?;
    if !q.is_integer() {
        return Err(JsonError::BadNumber(v.to_string()));
    }
    Ok(q.to_integer())
}

pub fn q_json(x: &Q) -> Value {
    Value::String(q_to_string(x))
}

pub fn z_json(x: &Z) -> Value {
    Value::String(x.to_string())
}

pub fn qvec_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(q_json).collect())
}

pub fn zvec_json(v: &[Z]) -> Value {
    Value::Array(v.iter().map(z_json).collect())
}

pub fn qmat_json(m: &QMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| q_json(m.at(i, j))).collect()))
            .collect(),
    )
}

// ---------------------------------------------------------------------------
// Argument parsers
// ---------------------------------------------------------------------------

fn parse_json(text: &str) -> Result<Value, JsonError> {
    serde_json::from_str(text).map_err(|e| JsonError::Syntax(e.to_string()))
}

fn value_to_qvec(v: &Value) -> Result<Vec<Q>, JsonError> {
    v.as_array()
        .ok_or_else(|| JsonError::BadShape("expected an array".into()))?
        .iter()
        .map(json_to_q)
        .collect()
}

/// Parse a symmetric Gram matrix given as a JSON array of rows, e.g.
/// `[[2,-1],[-1,2]]` or `[["1","1/2"],["1/2","1"]]`.
pub fn parse_gram(text: &str) -> Result<QMat, JsonError> {
    let v = parse_json(text)?;
    let rows = v
        .as_array()
        .ok_or_else(|| JsonError::BadShape("expected an array of rows".into()))?;
    if rows.is_empty() {
        return Err(JsonError::BadShape("matrix has no rows".into()));
    }
    let parsed: Vec<Vec<Q>> = rows.iter().map(value_to_qvec).collect::<Result<_, _>>()?;
    let n = parsed.len();
    if parsed.iter().any(|r| r.len() != n) {
        return Err(JsonError::BadShape(format!(
            "expected a square {n}x{n} matrix"
        )));
    }
    Ok(QMat::from_rows(parsed))
}

/// Parse a rational point `[x1, ..., xn]`.
pub fn parse_point(text: &str) -> Result<Vec<Q>, JsonError> {
    value_to_qvec(&parse_json(text)?)
}

/// Parse an integer vector `[m1, ..., mn]`.
pub fn parse_zvec(text: &str) -> Result<Vec<Z>, JsonError> {
    parse_json(text)?
        .as_array()
        .ok_or_else(|| JsonError::BadShape("expected an array".into()))?
        .iter()
        .map(json_to_z)
        .collect()
}

/// Parse a rational matrix (rows need not equal columns), e.g. for an
/// extension-class representative.
pub fn parse_qmat(text: &str) -> Result<QMat, JsonError> {
    let v = parse_json(text)?;
    let rows = v
        .as_array()
        .ok_or_else(|| JsonError::BadShape("expected an array of rows".into()))?;
    if rows.is_empty() {
        return Err(JsonError::BadShape("matrix has no rows".into()));
    }
    let parsed: Vec<Vec<Q>> = rows.iter().map(value_to_qvec).collect::<Result<_, _>>()?;
    let w = parsed[0].len();
    if w == 0 || parsed.iter().any(|r| r.len() != w) {
        return Err(JsonError::BadShape("ragged or empty rows".into()));
    }
    Ok(QMat::from_rows(parsed))
}

/// Parse an integer matrix (rows), e.g. a sublattice basis.
pub fn parse_zmat(text: &str) -> Result<crate::linalg::ZMat, JsonError> {
    let m = parse_qmat(text)?;
    let mut z = crate::linalg::ZMat::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = m.at(i, j);
            if !v.is_integer() {
                return Err(JsonError::BadNumber(q_to_string(v)));
            }
            z.set(i, j, v.to_integer());
        }
    }
    Ok(z)
}

pub fn zmat_json(m: &crate::linalg::ZMat) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|i| Value::Array((0..m.ncols()).map(|j| z_json(m.at(i, j))).collect()))
            .collect(),
    )
}

/// Interval for an exact-but-irrational quantity: rational endpoints plus
/// a float midpoint for readability.
pub fn enc_json(e: &crate::enclosure::Enc) -> Value {
    let mid = e.mid();
    json!({
        "lo": q_to_string(&e.lo),
        "hi": q_to_string(&e.hi),
        "approx": crate::rational::q_to_f64(&mid),
    })
}

fn parse_int_coeffs(text: &str) -> Result<Poly, JsonError> {
    let coeffs: Vec<Z> = parse_json(text)?
        .as_array()
        .ok_or_else(|| JsonError::BadShape("expected an array of coefficients".into()))?
        .iter()
        .map(json_to_z)
        .collect::<Result<_, _>>()?;
    Ok(Poly(coeffs.into_iter().map(Q::from_integer).collect()))
}

/// Parse a number-field spec: `rational`, `cyclotomic:N`,
/// `minpoly:[c0,...,1]` (ascending coefficients, totally real), or
/// `general:[c0,...,1]` (carrier only, no hermitian data).
pub fn parse_field(text: &str) -> Result<NumberFieldData, JsonError> {
    let t = text.trim();
    if t == "rational" {
        return Ok(NumberFieldData::rational());
    }
    if let Some(rest) = t.strip_prefix("cyclotomic:") {
        let n: u64 = rest
            .trim()
            .parse()
            .map_err(|_| JsonError::BadFieldSpec(text.to_string()))?;
        if n == 0 {
            return Err(JsonError::BadFieldSpec(text.to_string()));
        }
        return Ok(NumberFieldData::cyclotomic(n));
    }
    if let Some(rest) = t.strip_prefix("minpoly:") {
        return Ok(NumberFieldData::totally_real(parse_int_coeffs(rest)?)?);
    }
    if let Some(rest) = t.strip_prefix("general:") {
        return Ok(NumberFieldData::general(parse_int_coeffs(rest)?)?);
    }
    Err(JsonError::BadFieldSpec(text.to_string()))
}

/// JSON description of a field, inverse in spirit to `parse_field`.
pub fn field_json(k: &NumberFieldData) -> Value {
    match k.kind() {
        FieldKind::Cyclotomic(n) => json!({ "cyclotomic": n }),
        FieldKind::TotallyReal => json!({
            "minpoly": qvec_json(&k.minpoly().0),
            "kind": "totally_real",
        }),
        FieldKind::General => json!({
            "minpoly": qvec_json(&k.minpoly().0),
            "kind": "general",
        }),
    }
}

// ---------------------------------------------------------------------------
// Run reports
// ---------------------------------------------------------------------------

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Undecided,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub name: String,
    pub status: CheckStatus,
    pub detail: Value,
}

/// Aggregated result of a verification run: overall status is `fail` if
/// any check failed, else `undecided` if any check could not be decided
/// at the working precision, else `pass`.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: u32,
    pub command: String,
    /// Seed of the random sweeps, echoed when one was used.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub status: CheckStatus,
    pub checks: Vec<CheckReport>,
}

impl RunReport {
    pub fn new(command: &str) -> RunReport {
        RunReport {
            schema: SCHEMA_VERSION,
            command: command.to_string(),
            seed: None,
            status: CheckStatus::Pass,
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, name: &str, status: CheckStatus, detail: Value) {
        self.checks.push(CheckReport {
            name: name.to_string(),
            status,
            detail,
        });
        match status {
            CheckStatus::Fail => self.status = CheckStatus::Fail,
            CheckStatus::Undecided => {
                if self.status == CheckStatus::Pass {
                    self.status = CheckStatus::Undecided;
                }
            }
            CheckStatus::Pass => {}
        }
    }

    pub fn push_bool(&mut self, name: &str, ok: bool, detail: Value) {
        self.push(
            name,
            if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            detail,
        );
    }

    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }
}

/// Serialize any JSON value deterministically (serde_json objects are
/// ordered maps; report structs serialize fields in declaration order).
pub fn to_json_string(v: &Value, pretty: bool) -> String {
    if pretty {
        serde_json::to_string_pretty(v).expect("serialization cannot fail")
    } else {
        serde_json::to_string(v).expect("serialization cannot fail")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{q, qi};

    #[test]
    fn scalar_round_trips() {
        for x in [qi(0), qi(3), qi(-7), q(1, 2), q(-22, 7)] {
            assert_eq!(q_from_str(&q_to_string(&x)).unwrap(), x);
        }
        assert_eq!(q_to_string(&qi(3)), "3");
        assert_eq!(q_to_string(&q(-1, 2)), "-1/2");
        assert_eq!(q_from_str(" 4/6 ").unwrap(), q(2, 3));
        assert!(q_from_str("1/0").is_err());
        assert!(q_from_str("a").is_err());
        assert!(json_to_q(&json!(2.5)).is_err());
        assert_eq!(json_to_q(&json!(-4)).unwrap(), qi(-4));
        assert!(json_to_z(&json!("1/2")).is_err());
    }

    #[test]
    fn matrix_and_vector_parsing() {
        let g = parse_gram("[[2,-1],[-1,2]]").unwrap();
        assert_eq!(g.at(0, 1), &qi(-1));
        let g2 = parse_gram(r#"[["1","1/2"],["1/2","1"]]"#).unwrap();
        assert_eq!(g2.at(1, 0), &q(1, 2));
        assert!(parse_gram("[[1,0],[0]]").is_err());
        assert!(parse_gram("[[1,0]]").is_err());
        assert!(parse_gram("[]").is_err());
        assert!(parse_gram("nonsense").is_err());
        assert_eq!(parse_point(r#"[1,"3/2"]"#).unwrap(), vec![qi(1), q(3, 2)]);
        assert_eq!(parse_zvec("[1,-2]").unwrap().len(), 2);
        assert!(parse_zvec(r#"["1/2"]"#).is_err());
        let t = parse_qmat("[[1,2,3]]").unwrap();
        assert_eq!((t.nrows(), t.ncols()), (1, 3));
        assert_eq!(
            serde_json::to_string(&qmat_json(&g)).unwrap(),
            r#"[["2","-1"],["-1","2"]]"#
        );
    }

    #[test]
    fn field_specs() {
        assert_eq!(parse_field("rational").unwrap().degree(), 1);
        let k5 = parse_field("cyclotomic:5").unwrap();
        assert_eq!(k5.degree(), 4);
        assert_eq!(
            serde_json::to_string(&field_json(&k5)).unwrap(),
            r#"{"cyclotomic":5}"#
        );
        let tr = parse_field("minpoly:[-2,0,1]").unwrap();
        assert_eq!(tr.degree(), 2);
        assert_eq!(
            serde_json::to_string(&field_json(&tr)).unwrap(),
            r#"{"kind":"totally_real","minpoly":["-2","0","1"]}"#
        );
        assert!(parse_field("minpoly:[1,0,1]").is_err()); // not totally real
        assert!(parse_field("general:[1,0,1]").unwrap().degree() == 2);
        assert!(parse_field("cyclotomic:0").is_err());
        assert!(parse_field("quadratic:5").is_err());
    }

    #[test]
    fn report_status_aggregation() {
        let mut r = RunReport::new("demo");
        assert!(r.passed());
        r.push_bool("a", true, Value::Null);
        assert_eq!(r.status, CheckStatus::Pass);
        r.push("b", CheckStatus::Undecided, Value::Null);
        assert_eq!(r.status, CheckStatus::Undecided);
        r.push_bool("c", false, Value::Null);
        assert_eq!(r.status, CheckStatus::Fail);
        r.push_bool("d", true, Value::Null);
        assert_eq!(r.status, CheckStatus::Fail);
        let s = serde_json::to_string(&r).unwrap();
        assert!(s.starts_with(r#"{"schema":1,"command":"demo","status":"fail""#));
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["checks"].as_array().unwrap().len(), 4);
    }
}
