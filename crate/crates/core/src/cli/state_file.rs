//! JSON state files.
//!
//! ```json
//! {
//!   "dims": [2, 2],
//!   "kind": "pure",
//!   "label": "bell",
//!   "data": [[0.7071067811865476, 0.0], [0.0, 0.0], [0.0, 0.0], [0.7071067811865476, 0.0]]
//! }
//! ```
//!
//! Complex numbers are `[re, im]` pairs. Pure states carry a vector of
//! `dA·dB` amplitudes; density matrices carry `dA·dB` rows of `dA·dB` entries.
//! Numbers are written in shortest round-trip form, so parsing a written file
//! reproduces every double bit for bit.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::Error;
use crate::linalg::{BipartiteDims, ComplexMatrix, C64};
use crate::states::{validate_density, DensityMatrix, PureState};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed state file: {0}")]
    MalformedFile(String),

    #[error("schema violation at `{field}`: {reason}")]
    SchemaViolation { field: String, reason: String },

    #[error("validation failed for `{field}`: {source}")]
    ValidationFailure {
        field: &'static str,
        #[source]
        source: Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Density,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateData {
    Vector(Vec<[f64; 2]>),
    Matrix(Vec<Vec<[f64; 2]>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub dims: [usize; 2],
    pub kind: StateKind,
    pub data: StateData,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// A state file after validation.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedState {
    Pure(PureState),
    Density(DensityMatrix),
}

impl LoadedState {
    pub fn dims(&self) -> BipartiteDims {
        match self {
            LoadedState::Pure(p) => p.dims(),
            LoadedState::Density(r) => r.dims(),
        }
    }

    pub fn density(&self) -> DensityMatrix {
        match self {
            LoadedState::Pure(p) => p.projector(),
            LoadedState::Density(r) => r.clone(),
        }
    }
}

fn pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

fn schema(field: impl Into<String>, reason: impl Into<String>) -> FileError {
    FileError::SchemaViolation {
        field: field.into(),
        reason: reason.into(),
    }
}

fn validation_field(e: &Error) -> &'static str {
    match e {
        Error::NotNormalized { .. } | Error::ZeroVector => "norm",
        Error::TraceNotOne { .. } => "trace",
        Error::NotHermitian { .. } => "hermiticity",
        Error::NotPsd { .. } | Error::NegativeEigenvalue { .. } => "eigenvalues",
        Error::DimensionMismatch { .. } | Error::InvalidDimension(_) => "dims",
        Error::NonFinite => "data",
        _ => "data",
    }
}

fn validation(e: Error) -> FileError {
    FileError::ValidationFailure {
        field: validation_field(&e),
        source: e,
    }
}

impl StateFile {
    pub fn from_pure(psi: &PureState, label: Option<String>) -> Self {
        let d = psi.dims();
        Self {
            dims: [d.a, d.b],
            kind: StateKind::Pure,
            data: StateData::Vector(psi.amplitudes().iter().copied().map(pair).collect()),
            label,
        }
    }

    pub fn from_density(rho: &DensityMatrix, label: Option<String>) -> Self {
        let d = rho.dims();
        let m = rho.matrix();
        Self {
            dims: [d.a, d.b],
            kind: StateKind::Density,
            data: StateData::Matrix(
                (0..m.rows())
                    .map(|i| m.row(i).iter().copied().map(pair).collect())
                    .collect(),
            ),
            label,
        }
    }

    /// Checks shape against `dims` and `kind`, then runs the state validators.
    pub fn validate(&self) -> Result<LoadedState, FileError> {
        let [a, b] = self.dims;
        let dims = BipartiteDims::new(a, b).map_err(|e| schema("dims", e.to_string()))?;
        let n = dims.total();
        let to_c = |p: &[f64; 2]| C64::new(p[0], p[1]);
        match (&self.kind, &self.data) {
            (StateKind::Pure, StateData::Vector(v)) => {
                if v.len() != n {
                    return Err(schema(
                        "data",
                        format!("pure state needs {n} amplitudes, found {}", v.len()),
                    ));
                }
                let amps = v.iter().map(to_c).collect();
                PureState::new(dims, amps)
                    .map(LoadedState::Pure)
                    .map_err(validation)
            }
            (StateKind::Density, StateData::Matrix(rows)) => {
                if rows.len() != n {
                    return Err(schema(
                        "data",
                        format!("density matrix needs {n} rows, found {}", rows.len()),
                    ));
                }
                let mut entries = Vec::with_capacity(n * n);
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != n {
                        return Err(schema(
                            format!("data[{i}]"),
                            format!("row needs {n} entries, found {}", row.len()),
                        ));
                    }
                    entries.extend(row.iter().map(to_c));
                }
                let m = ComplexMatrix::from_row_major(n, n, entries).map_err(validation)?;
                validate_density(&m, dims)
                    .map(LoadedState::Density)
                    .map_err(validation)
            }
            (StateKind::Pure, StateData::Matrix(_)) => Err(schema(
                "data",
                "kind `pure` expects a vector of [re, im] pairs",
            )),
            (StateKind::Density, StateData::Vector(v)) if v.is_empty() => {
                Err(schema("data", "density matrix is empty"))
            }
            (StateKind::Density, StateData::Vector(_)) => Err(schema(
                "data",
                "kind `density` expects a matrix of [re, im] pairs",
            )),
        }
    }

    /// Serializes with one amplitude or matrix row per line.
    pub fn to_json(&self) -> String {
        fn num(x: f64) -> String {
            serde_json::to_string(&x).expect("finite doubles serialize")
        }
        fn pairs(v: &[[f64; 2]]) -> String {
            let items: Vec<String> = v
                .iter()
                .map(|p| format!("[{}, {}]", num(p[0]), num(p[1])))
                .collect();
            format!("[{}]", items.join(", "))
        }
        let mut out = String::from("{\n");
        let _ = writeln!(out, "  \"dims\": [{}, {}],", self.dims[0], self.dims[1]);
        let kind = match self.kind {
            StateKind::Pure => "pure",
            StateKind::Density => "density",
        };
        let _ = writeln!(out, "  \"kind\": \"{kind}\",");
        if let Some(label) = &self.label {
            let _ = writeln!(
                out,
                "  \"label\": {},",
                serde_json::to_string(label).expect("strings serialize")
            );
        }
        match &self.data {
            StateData::Vector(v) => {
                let _ = writeln!(out, "  \"data\": {}", pairs(v));
            }
            StateData::Matrix(rows) => {
                out.push_str("  \"data\": [\n");
                for (i, row) in rows.iter().enumerate() {
                    let sep = if i + 1 == rows.len() { "" } else { "," };
                    let _ = writeln!(out, "    {}{sep}", pairs(row));
                }
                out.push_str("  ]\n");
            }
        }
        out.push_str("}\n");
        out
    }
}

pub fn parse_state_str(text: &str) -> Result<StateFile, FileError> {
    serde_json::from_str(text).map_err(|e| match e.classify() {
        serde_json::error::Category::Data => schema("(root)", e.to_string()),
        _ => FileError::MalformedFile(e.to_string()),
    })
}

pub fn parse_state(path: &Path) -> Result<StateFile, FileError> {
    let text = fs::read_to_string(path).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_state_str(&text)
}

pub fn load_state(path: &Path) -> Result<LoadedState, FileError> {
    parse_state(path)?.validate()
}

pub fn write_state(path: &Path, file: &StateFile) -> Result<(), FileError> {
    fs::write(path, file.to_json()).map_err(|source| FileError::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{isotropic_state, random_density, random_pure};

    #[test]
    fn minimal_pure_file_parses() {
        let text = r#"{"dims": [2, 2], "kind": "pure", "data": [[1, 0], [0, 0], [0, 0], [0, 0]]}"#;
        let f = parse_state_str(text).unwrap();
        assert!(matches!(f.validate().unwrap(), LoadedState::Pure(_)));
    }

    #[test]
    fn trace_violation_names_trace() {
        let text = r#"{"dims": [1, 2], "kind": "density", "data": [[[0.5, 0], [0, 0]], [[0, 0], [0.4, 0]]]}"#;
        let err = parse_state_str(text).unwrap().validate().unwrap_err();
        match err {
            FileError::ValidationFailure { field, .. } => assert_eq!(field, "trace"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_file_is_malformed() {
        let text = r#"{"dims": [2, 2], "kind": "pure", "data": [[1, 0], [0,"#;
        assert!(matches!(
            parse_state_str(text),
            Err(FileError::MalformedFile(_))
        ));
    }

    #[test]
    fn schema_errors() {
        let wrong_kind = r#"{"dims": [2, 2], "kind": "mixed", "data": []}"#;
        assert!(matches!(
            parse_state_str(wrong_kind),
            Err(FileError::SchemaViolation { .. })
        ));
        let short = r#"{"dims": [2, 2], "kind": "pure", "data": [[1, 0]]}"#;
        assert!(matches!(
            parse_state_str(short).unwrap().validate(),
            Err(FileError::SchemaViolation { .. })
        ));
        let mismatch =
            r#"{"dims": [1, 2], "kind": "pure", "data": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}"#;
        assert!(matches!(
            parse_state_str(mismatch).unwrap().validate(),
            Err(FileError::SchemaViolation { .. })
        ));
        let ragged = r#"{"dims": [1, 2], "kind": "density", "data": [[[1, 0], [0, 0]], [[0, 0]]]}"#;
        assert!(matches!(
            parse_state_str(ragged).unwrap().validate(),
            Err(FileError::SchemaViolation { .. })
        ));
    }

    #[test]
    fn unnormalized_pure_names_norm() {
        let text = r#"{"dims": [1, 2], "kind": "pure", "data": [[1, 0], [1, 0]]}"#;
        match parse_state_str(text).unwrap().validate() {
            Err(FileError::ValidationFailure { field, .. }) => assert_eq!(field, "norm"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn written_files_round_trip_exactly() {
        let dims = BipartiteDims::new(2, 3).unwrap();
        let files = [
            StateFile::from_pure(&random_pure(dims, 1), Some("random \"pure\"".into())),
            StateFile::from_density(&random_density(dims, 4, 2).unwrap(), None),
            StateFile::from_density(&isotropic_state(0.3, 3).unwrap(), Some("iso".into())),
        ];
        for f in files {
            let text = f.to_json();
            assert!(!text.contains('\r'));
            let back = parse_state_str(&text).unwrap();
            assert_eq!(back, f);
            back.validate().unwrap();
        }
    }
}
