//! JSON encodings of forms, quadratic forms and polyaffine representations.
//!
//! A form is `{"n": 6, "k": 2, "coeffs": {"1,2": 1.0, "3,4": -2.0}}`: a sparse
//! map keyed by comma-joined increasing indices, absent keys being zero.
//! Exact coefficients are written as strings `"p/q"`; readers accept numbers
//! or such strings. A quadratic form is `{"n", "k", "matrix"}` with `matrix`
//! a dense row-major array of rows in the lexicographic basis order.

use crate::algebra::{KForm, LinearMap};
use crate::error::{Error, Result};
use crate::multi_index::{basis, MultiIndex};
use crate::quadratic::QuadraticForm;
use crate::quasiaffine::PolyaffineRep;
use crate::scalar::{exact_from_f64, format_exact, parse_exact, Exact, Scalar};
use serde_json::{json, Map, Value};
use std::path::Path;

fn bad(key: &str, msg: impl std::fmt::Display) -> Error {
    Error::Json(format!("key \"{key}\": {msg}"))
}

fn get_usize(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    obj.get(key)
        .ok_or_else(|| bad(key, "missing"))?
        .as_u64()
        .map(|v| v as usize)
        .ok_or_else(|| bad(key, "expected a nonnegative integer"))
}

fn as_object<'a>(v: &'a Value, what: &str) -> Result<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| Error::Json(format!("{what} must be a JSON object")))
}

fn label(idx: &[usize]) -> String {
    idx.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

fn parse_label(n: usize, k: usize, key: &str) -> Result<usize> {
    let indices = if key.trim().is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|p| p.trim().parse::<usize>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad(&format!("coeffs.{key}"), "expected comma-separated indices"))?
    };
    if indices.len() != k {
        return Err(bad(&format!("coeffs.{key}"), format!("expected {k} indices")));
    }
    MultiIndex::new(n, indices)
        .map(|m| m.rank())
        .map_err(|e| bad(&format!("coeffs.{key}"), e))
}

fn read_form<S: Scalar>(v: &Value, parse: impl Fn(&Value) -> Option<S>) -> Result<KForm<S>> {
    let obj = as_object(v, "a form")?;
    let (n, k) = (get_usize(obj, "n")?, get_usize(obj, "k")?);
    let mut form = KForm::zero(n, k).map_err(|e| bad("k", e))?;
    let coeffs = obj.get("coeffs").ok_or_else(|| bad("coeffs", "missing"))?;
    let coeffs = coeffs.as_object().ok_or_else(|| bad("coeffs", "expected an object"))?;
    for (key, val) in coeffs {
        let rank = parse_label(n, k, key)?;
        form.coeffs_mut()[rank] =
            parse(val).ok_or_else(|| bad(&format!("coeffs.{key}"), "expected a number or \"p/q\""))?;
    }
    Ok(form)
}

fn write_form<S: Scalar>(x: &KForm<S>, render: impl Fn(&S) -> Value) -> Value {
    let mut coeffs = Map::new();
    for (idx, c) in basis(x.n(), x.degree()).iter().zip(x.coeffs()) {
        if !c.is_zero() {
            coeffs.insert(label(idx), render(c));
        }
    }
    json!({ "n": x.n(), "k": x.degree(), "coeffs": coeffs })
}

fn float_value(v: &Value) -> Option<f64> {
    v.as_f64()
        .or_else(|| v.as_str().and_then(parse_exact).map(|q| Scalar::to_f64(&q)))
        .filter(|x| x.is_finite())
}

fn exact_value(v: &Value) -> Option<Exact> {
    match v {
        Value::String(s) => parse_exact(s),
        Value::Number(_) => v.as_f64().filter(|x| x.is_finite()).map(exact_from_f64),
        _ => None,
    }
}

pub fn form_to_json(x: &KForm) -> Value {
    write_form(x, |c| json!(c))
}

pub fn form_from_json(v: &Value) -> Result<KForm> {
    read_form(v, float_value)
}

pub fn exact_form_to_json(x: &KForm<Exact>) -> Value {
    write_form(x, |c| json!(format_exact(c)))
}

pub fn exact_form_from_json(v: &Value) -> Result<KForm<Exact>> {
    read_form(v, exact_value)
}

pub fn quadratic_to_json(q: &QuadraticForm) -> Value {
    let m = q.matrix();
    let rows: Vec<Vec<f64>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| *m.get(i, j)).collect())
        .collect();
    json!({ "n": q.n(), "k": q.degree(), "matrix": rows })
}

fn read_matrix<S: Scalar>(obj: &Map<String, Value>, parse: impl Fn(&Value) -> Option<S>) -> Result<Vec<Vec<S>>> {
    let rows = obj
        .get("matrix")
        .ok_or_else(|| bad("matrix", "missing"))?
        .as_array()
        .ok_or_else(|| bad("matrix", "expected an array of rows"))?;
    let parsed = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.as_array()
                .ok_or_else(|| bad(&format!("matrix[{i}]"), "expected an array"))?
                .iter()
                .enumerate()
                .map(|(j, v)| parse(v).ok_or_else(|| bad(&format!("matrix[{i}][{j}]"), "expected a finite number")))
                .collect::<Result<Vec<S>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if parsed.iter().any(|r| r.len() != parsed.len()) {
        return Err(bad("matrix", "rows must all have the matrix's row count"));
    }
    Ok(parsed)
}

/// Reads `{"n", "k", "matrix"}`; the matrix is symmetrized.
pub fn quadratic_from_json(v: &Value) -> Result<QuadraticForm> {
    let obj = as_object(v, "a quadratic form")?;
    let (n, k) = (get_usize(obj, "n")?, get_usize(obj, "k")?);
    let parsed = read_matrix(obj, float_value)?;
    QuadraticForm::new(n, k, crate::linalg::Dense::from_rows(&parsed)).map_err(|e| bad("matrix", e))
}

fn read_linear_map<S: Scalar>(v: &Value, parse: impl Fn(&Value) -> Option<S>) -> Result<LinearMap<S>> {
    let obj = as_object(v, "a linear map")?;
    let n = get_usize(obj, "n")?;
    let rows = read_matrix(obj, parse)?;
    if rows.len() != n {
        return Err(bad("matrix", format!("expected {n} rows")));
    }
    LinearMap::from_rows(&rows).map_err(|e| bad("matrix", e))
}

/// Reads a linear map `T: ℝⁿ → ℝⁿ` as `{"n", "matrix"}`.
pub fn linear_map_from_json(v: &Value) -> Result<LinearMap> {
    read_linear_map(v, float_value)
}

pub fn exact_linear_map_from_json(v: &Value) -> Result<LinearMap<Exact>> {
    read_linear_map(v, exact_value)
}

pub fn rep_to_json(rep: &PolyaffineRep) -> Value {
    Value::Array(rep.coefficients().iter().map(form_to_json).collect())
}

pub fn exact_rep_to_json(rep: &PolyaffineRep<Exact>) -> Value {
    Value::Array(rep.coefficients().iter().map(exact_form_to_json).collect())
}

/// Reads a list of forms `c₀, c₁, …`; `n` is taken from the entries and
/// `k` from `c₁`.
pub fn rep_from_json(v: &Value) -> Result<PolyaffineRep> {
    let items = v
        .as_array()
        .ok_or_else(|| Error::Json("a representation must be a list of forms".into()))?;
    let forms = items.iter().map(form_from_json).collect::<Result<Vec<_>>>()?;
    let n = forms
        .first()
        .ok_or_else(|| Error::Json("empty representation".into()))?
        .n();
    let k = forms
        .get(1)
        .map(KForm::degree)
        .ok_or_else(|| Error::Json("a representation needs c₀ and c₁".into()))?;
    PolyaffineRep::new(n, k, forms)
}

pub fn read_json_file(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Json(format!("{}: {e}", path.display())))
}
