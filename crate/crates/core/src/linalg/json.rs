//! Matrix interchange format: `{"dim": n, "entries": [[[re, im], ...], ...]}`, row major.
//!
//! Numbers are written with 17 significant digits so a write/read cycle is exact.

use std::fmt::Write as _;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;

use super::{Complex64, Hermitian, SkewHermitian, SquareMatrix, Unitary};
use crate::error::{GeoError, Result};

#[derive(Deserialize)]
struct MatrixRepr {
    dim: usize,
    entries: Vec<Vec<[f64; 2]>>,
}

fn push_number(out: &mut String, x: f64) {
    if x.is_finite() {
        let _ = write!(out, "{x:.16e}");
    } else {
        out.push_str("null");
    }
}

/// Formats a float the way the interchange format does.
pub fn format_number(x: f64) -> String {
    let mut s = String::new();
    push_number(&mut s, x);
    s
}

/// Serializes a square matrix to the interchange format.
pub fn matrix_to_json(m: &SquareMatrix) -> String {
    let n = m.nrows();
    let mut out = String::with_capacity(48 * n * n + 32);
    let _ = write!(out, "{{\"dim\":{n},\"entries\":[");
    for i in 0..n {
        if i > 0 {
            out.push(',');
        }
        out.push('[');
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(',');
            }
            out.push('[');
            push_number(&mut out, m[(i, j)].re);
            out.push(',');
            push_number(&mut out, m[(i, j)].im);
            out.push(']');
        }
        out.push(']');
    }
    out.push_str("]}");
    out
}

fn from_repr(r: MatrixRepr) -> Result<SquareMatrix> {
    if r.entries.len() != r.dim {
        return Err(GeoError::Dimension { expected: r.dim, found: r.entries.len() });
    }
    for row in &r.entries {
        if row.len() != r.dim {
            return Err(GeoError::Dimension { expected: r.dim, found: row.len() });
        }
    }
    Ok(SquareMatrix::from_fn(r.dim, r.dim, |i, j| {
        let [re, im] = r.entries[i][j];
        Complex64::new(re, im)
    }))
}

/// Parses the interchange format.
pub fn matrix_from_json(s: &str) -> Result<SquareMatrix> {
    let r: MatrixRepr = serde_json::from_str(s)?;
    from_repr(r)
}

pub fn matrix_to_raw(m: &SquareMatrix) -> Box<RawValue> {
    RawValue::from_string(matrix_to_json(m)).expect("matrix writer emits valid json")
}

/// `#[serde(with = "...")]` adapter for bare matrices.
pub mod matrix_serde {
    use super::*;

    pub fn serialize<S: Serializer>(m: &SquareMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
        matrix_to_raw(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<SquareMatrix, D::Error> {
        let r = MatrixRepr::deserialize(d)?;
        from_repr(r).map_err(D::Error::custom)
    }
}

macro_rules! serde_structured {
    ($name:ident) => {
        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                matrix_serde::serialize(self.as_matrix(), s)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let m = matrix_serde::deserialize(d)?;
                $name::new(m).map_err(D::Error::custom)
            }
        }
    };
}

serde_structured!(Hermitian);
serde_structured!(SkewHermitian);
serde_structured!(Unitary);
