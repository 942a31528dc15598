//! Instance files.
//!
//! ```json
//! {"F": 2, "N": 2,
//!  "A": [[[1, 0], [0, 1]], [[2, 1], [0, 1]]],
//!  "X": [[1, 0], [0, 1]],
//!  "Y": [[1, "1/2"], [0, 1]]}
//! ```
//!
//! Matrices are row-major arrays of rows. A scalar is a JSON number or a
//! string holding `"p/q"`, an integer, or a decimal; both forms are accepted
//! in either mode. Output uses numbers in FLOAT mode and strings in EXACT
//! mode.
//!
//! Malformed JSON or wrongly typed fields are [`Error::Parse`]; well-typed
//! content with inconsistent dimensions is [`Error::Shape`].

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::instance::KronRankOneInstance;
use crate::matrix::DenseMatrix;
use crate::scalar::Scalar;

pub fn parse_instance<T: Scalar>(text: &str) -> Result<KronRankOneInstance<T>> {
    let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("invalid JSON: {e}")))?;
    let obj = doc
        .as_object()
        .ok_or_else(|| Error::Parse("instance must be a JSON object".into()))?;

    let f = count_field(obj, "F")?;
    let n = count_field(obj, "N")?;
    let a = field(obj, "A")?
        .as_array()
        .ok_or_else(|| Error::Parse("\"A\" must be an array of matrices".into()))?
        .iter()
        .enumerate()
        .map(|(k, m)| parse_matrix(m, &format!("A[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let x = parse_matrix(field(obj, "X")?, "X")?;
    let y = parse_matrix(field(obj, "Y")?, "Y")?;
    KronRankOneInstance::new(f, n, a, x, y)
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn count_field(obj: &Map<String, Value>, key: &str) -> Result<usize> {
    field(obj, key)?
        .as_u64()
        .and_then(|v| usize::try_from(v).ok())
        .ok_or_else(|| Error::Parse(format!("{key:?} must be a non-negative integer")))
}

fn parse_matrix<T: Scalar>(v: &Value, name: &str) -> Result<DenseMatrix<T>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse(format!("{name} must be an array of rows")))?;
    let rows = rows
        .iter()
        .map(|row| {
            row.as_array()
                .ok_or_else(|| Error::Parse(format!("{name}: each row must be an array")))?
                .iter()
                .map(|s| parse_scalar(s, name))
                .collect::<Result<Vec<T>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    if rows.is_empty() {
        return Err(Error::Shape(format!("{name} has no rows")));
    }
    DenseMatrix::from_rows(rows).map_err(|e| match e {
        Error::Shape(msg) => Error::Shape(format!("{name}: {msg}")),
        other => other,
    })
}

fn parse_scalar<T: Scalar>(v: &Value, name: &str) -> Result<T> {
    let parsed = match v {
        Value::Number(num) => T::parse_literal(&num.to_string()),
        Value::String(s) => T::parse_literal(s),
        other => return Err(Error::Parse(format!("{name}: {other} is not a scalar"))),
    };
    parsed.map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{name}: {msg}")),
        other => other,
    })
}

fn matrix_to_json<T: Scalar>(m: &DenseMatrix<T>) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(Scalar::to_json).collect()))
            .collect(),
    )
}

pub fn instance_to_json<T: Scalar>(inst: &KronRankOneInstance<T>) -> Value {
    json!({
        "F": inst.f(),
        "N": inst.n(),
        "A": inst.a().iter().map(matrix_to_json).collect::<Vec<_>>(),
        "X": matrix_to_json(inst.x()),
        "Y": matrix_to_json(inst.y()),
    })
}

pub fn instance_to_string<T: Scalar>(inst: &KronRankOneInstance<T>) -> String {
    serde_json::to_string_pretty(&instance_to_json(inst)).expect("JSON values always serialize")
}
