use super::algebra::LieAlgebra;
use crate::error::{Error, Result};
use crate::rational::{q_from_json, qstr, zero_vec, QMatrix, Q};
use serde_json::{json, Value};

fn perr(msg: &str) -> Error {
    Error::Parse(msg.to_string())
}

pub fn matrix_from_json(v: &Value, n: usize) -> Result<QMatrix> {
    let rows = v.as_array().ok_or_else(|| perr("matrix must be an array of rows"))?;
    if rows.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: rows.len() });
    }
    let mut out = Vec::with_capacity(n);
    for r in rows {
        let r = r.as_array().ok_or_else(|| perr("matrix row must be an array"))?;
        if r.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: r.len() });
        }
        out.push(r.iter().map(q_from_json).collect::<Result<Vec<Q>>>()?);
    }
    Ok(QMatrix::from_rows(n, &out))
}

pub fn vector_from_json(v: &Value) -> Result<Vec<Q>> {
    v.as_array().ok_or_else(|| perr("vector must be an array"))?.iter().map(q_from_json).collect()
}

pub fn vector_to_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(qstr(x))).collect())
}

pub fn matrix_to_json(m: &QMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector_to_json(r)).collect())
}

/// Parses `{"dim", "labels", "brackets": [[i, j, [[k, "p/q"], …]], …], "form", "theta"}`.
/// Only brackets with i < j need to be listed; the rest follow by antisymmetry.
pub fn algebra_from_json(v: &Value) -> Result<LieAlgebra> {
    let n = v.get("dim").and_then(Value::as_u64).ok_or_else(|| perr("missing dim"))? as usize;
    let labels: Vec<String> = match v.get("labels") {
        Some(l) => l
            .as_array()
            .ok_or_else(|| perr("labels must be an array"))?
            .iter()
            .map(|s| s.as_str().map(str::to_string).ok_or_else(|| perr("label must be a string")))
            .collect::<Result<_>>()?,
        None => (0..n).map(|i| format!("e{i}")).collect(),
    };
    if labels.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: labels.len() });
    }
    let mut c = vec![vec![zero_vec(n); n]; n];
    let mut seen = vec![vec![false; n]; n];
    for entry in v.get("brackets").and_then(Value::as_array).ok_or_else(|| perr("missing brackets"))? {
        let e = entry.as_array().ok_or_else(|| perr("bracket entry must be [i, j, terms]"))?;
        if e.len() != 3 {
            return Err(perr("bracket entry must be [i, j, terms]"));
        }
        let i = e[0].as_u64().ok_or_else(|| perr("bad index"))? as usize;
        let j = e[1].as_u64().ok_or_else(|| perr("bad index"))? as usize;
        if i >= n || j >= n {
            return Err(perr("bracket index out of range"));
        }
        let mut vec = zero_vec(n);
        for t in e[2].as_array().ok_or_else(|| perr("terms must be an array"))? {
            let t = t.as_array().ok_or_else(|| perr("term must be [k, coeff]"))?;
            if t.len() != 2 {
                return Err(perr("term must be [k, coeff]"));
            }
            let k = t[0].as_u64().ok_or_else(|| perr("bad index"))? as usize;
            if k >= n {
                return Err(perr("term index out of range"));
            }
            vec[k] += q_from_json(&t[1])?;
        }
        if seen[j][i] && i != j {
            // both orders given: consistency is checked by validation
            c[i][j] = vec;
        } else {
            c[j][i] = vec.iter().map(|x| -x.clone()).collect();
            c[i][j] = vec;
        }
        seen[i][j] = true;
    }
    let form = matrix_from_json(v.get("form").ok_or_else(|| perr("missing form"))?, n)?;
    let theta = match v.get("theta") {
        Some(Value::Null) | None => None,
        Some(t) => Some(matrix_from_json(t, n)?),
    };
    LieAlgebra::new(labels, c, form, theta)
}

pub fn algebra_to_json(g: &LieAlgebra) -> Value {
    let n = g.dim();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let terms: Vec<Value> =
                g.basis_bracket_sparse(i, j).iter().map(|(k, c)| json!([k, qstr(c)])).collect();
            if !terms.is_empty() {
                brackets.push(json!([i, j, terms]));
            }
        }
    }
    let mut out = json!({
        "dim": n,
        "labels": g.labels(),
        "brackets": brackets,
        "form": matrix_to_json(g.form()),
    });
    if let Some(t) = g.theta() {
        out["theta"] = matrix_to_json(t);
    }
    out
}
