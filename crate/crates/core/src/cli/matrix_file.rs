//! The matrix interchange format:
//! `{"n": 2, "rows": [[[re, im], [re, im]], [[re, im], [re, im]]]}`.

use std::path::Path;

use serde_json::{json, Value};
use thiserror::Error;

use crate::linalg::{ComplexMatrix, C64};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InputError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("missing field `{field}`")]
    MissingField { field: &'static str },

    #[error("{field}: {message}")]
    Structure { field: String, message: String },

    #[error("{field}: expected a number, found {found}")]
    Numeric { field: String, found: String },

    #[error("{field}: value is not finite")]
    NonFinite { field: String },

    #[error("shape mismatch: n = {n} but {detail}")]
    Shape { n: usize, detail: String },
}

impl InputError {
    /// Stable identifier printed alongside the message.
    pub fn code(&self) -> &'static str {
        match self {
            InputError::Io { .. } => "E_IO",
            InputError::Syntax { .. } => "E_SYNTAX",
            InputError::MissingField { .. } => "E_MISSING_FIELD",
            InputError::Structure { .. } => "E_STRUCTURE",
            InputError::Numeric { .. } => "E_NUMERIC",
            InputError::NonFinite { .. } => "E_NON_FINITE",
            InputError::Shape { .. } => "E_SHAPE",
        }
    }
}

pub fn parse_matrix_file(path: &Path) -> Result<ComplexMatrix, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_matrix_str(&text)
}

pub fn parse_matrix_str(text: &str) -> Result<ComplexMatrix, InputError> {
    let doc: Value = serde_json::from_str(text).map_err(|e| InputError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = doc.as_object().ok_or_else(|| InputError::Structure {
        field: "(root)".into(),
        message: "expected an object".into(),
    })?;
    let n_val = obj.get("n").ok_or(InputError::MissingField { field: "n" })?;
    let n = n_val
        .as_u64()
        .filter(|n| *n > 0)
        .ok_or_else(|| InputError::Structure {
            field: "n".into(),
            message: format!("expected a positive integer, found {n_val}"),
        })? as usize;
    let rows = obj
        .get("rows")
        .ok_or(InputError::MissingField { field: "rows" })?
        .as_array()
        .ok_or_else(|| InputError::Structure {
            field: "rows".into(),
            message: "expected an array of rows".into(),
        })?;
    if rows.len() != n {
        return Err(InputError::Shape {
            n,
            detail: format!("`rows` has {} rows", rows.len()),
        });
    }
    let mut data = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| InputError::Structure {
            field: format!("rows[{i}]"),
            message: "expected an array of entries".into(),
        })?;
        if row.len() != n {
            return Err(InputError::Shape {
                n,
                detail: format!("rows[{i}] has {} entries", row.len()),
            });
        }
        for (j, entry) in row.iter().enumerate() {
            data.push(parse_entry(entry, i, j)?);
        }
    }
    ComplexMatrix::from_vec(n, n, data).map_err(|e| InputError::Structure {
        field: "rows".into(),
        message: e.to_string(),
    })
}

fn parse_entry(entry: &Value, i: usize, j: usize) -> Result<C64, InputError> {
    let pair = entry
        .as_array()
        .filter(|a| a.len() == 2)
        .ok_or_else(|| InputError::Structure {
            field: format!("rows[{i}][{j}]"),
            message: format!("expected a two-element array [re, im], found {entry}"),
        })?;
    let part = |k: usize| -> Result<f64, InputError> {
        let field = format!("rows[{i}][{j}][{k}]");
        let v = pair[k].as_f64().ok_or_else(|| InputError::Numeric {
            field: field.clone(),
            found: pair[k].to_string(),
        })?;
        if !v.is_finite() {
            return Err(InputError::NonFinite { field });
        }
        Ok(v)
    };
    Ok(C64::new(part(0)?, part(1)?))
}

/// A matrix in the interchange format.
pub fn matrix_to_json(m: &ComplexMatrix) -> Value {
    let rows: Vec<Value> = (0..m.rows())
        .map(|i| Value::Array(m.row(i).iter().map(complex_to_json).collect()))
        .collect();
    json!({ "n": m.rows(), "rows": rows })
}

pub fn complex_to_json(z: &C64) -> Value {
    json!([z.re, z.im])
}

pub fn vector_to_json(v: &[C64]) -> Value {
    Value::Array(v.iter().map(complex_to_json).collect())
}
