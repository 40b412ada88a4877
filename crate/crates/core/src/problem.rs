//! JSON problem files.
//!
//! ```json
//! {"version": 1, "d": 5, "s": 1, "sqrtD": 2,
//!  "Q": [["1","0",...], ...], "M": [["1", {"a":"0","b":"1","sqrt":2}, ...]],
//!  "a": "0", "experiment": {...}}
//! ```
//!
//! Scalars are `"p/q"`, integers, or `{"a": "p/q", "b": "r/s", "sqrt": D}`.
//! `version` defaults to 1; `experiment` is only read by `density`.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::density::ExperimentBlock;
use crate::exactnum::{QMatrix, QuadScalar};
use crate::quadforms::{FormError, LinearMap, QuadraticForm};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
    #[error("unsupported schema version {0}, expected {SCHEMA_VERSION}")]
    Version(u32),
}

fn field(field: impl Into<String>, message: impl Into<String>) -> ProblemError {
    ProblemError::Field { field: field.into(), message: message.into() }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default = "default_version")]
    pub version: u32,
    pub d: usize,
    pub s: usize,
    #[serde(rename = "sqrtD", default)]
    pub sqrt_d: Option<u64>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<QuadScalar>>,
    #[serde(rename = "M")]
    pub m: Vec<Vec<QuadScalar>>,
    pub a: QuadScalar,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<ExperimentBlock>,
}

fn default_version() -> u32 {
    SCHEMA_VERSION
}

/// A validated problem `(Q, M, a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Problem {
    pub q: QuadraticForm,
    pub m: LinearMap,
    pub a: QuadScalar,
    pub sqrt_d: Option<u64>,
    pub experiment: Option<ExperimentBlock>,
}

fn matrix(name: &str, rows: &[Vec<QuadScalar>], r: usize, c: usize, root: Option<u64>) -> Result<QMatrix, ProblemError> {
    if rows.len() != r {
        return Err(field(name, format!("expected {r} rows, found {}", rows.len())));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(field(format!("{name}[{i}]"), format!("expected {c} entries, found {}", row.len())));
        }
        for (j, x) in row.iter().enumerate() {
            check_root(&format!("{name}[{i}][{j}]"), x, root)?;
        }
    }
    QMatrix::from_rows(rows.to_vec()).map_err(|e| field(name, e.to_string()))
}

fn check_root(name: &str, x: &QuadScalar, root: Option<u64>) -> Result<(), ProblemError> {
    match (x.root(), root) {
        (0, _) => Ok(()),
        (r, Some(d)) if r == d => Ok(()),
        (r, Some(d)) => Err(field(name, format!("uses sqrt({r}) but sqrtD is {d}"))),
        (r, None) => Err(field(name, format!("uses sqrt({r}) but sqrtD is null"))),
    }
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        serde_json::from_str(text).map_err(|e| ProblemError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ProblemError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ProblemError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<Problem, ProblemError> {
        if self.version != SCHEMA_VERSION {
            return Err(ProblemError::Version(self.version));
        }
        if self.d == 0 {
            return Err(field("d", "must be positive"));
        }
        let root = self.sqrt_d;
        let q = matrix("Q", &self.q, self.d, self.d, root)?;
        let m = matrix("M", &self.m, self.s, self.d, root)?;
        check_root("a", &self.a, root)?;
        let q = QuadraticForm::new(q).map_err(|e| field("Q", e.to_string()))?;
        let m = LinearMap::new(m).map_err(|e: FormError| field("M", e.to_string()))?;
        Ok(Problem { q, m, a: self.a.clone(), sqrt_d: root, experiment: self.experiment.clone() })
    }

    pub fn from_problem(p: &Problem) -> Self {
        Self {
            version: SCHEMA_VERSION,
            d: p.q.dim(),
            s: p.m.s(),
            sqrt_d: p.sqrt_d,
            q: p.q.gram().to_rows(),
            m: p.m.matrix().to_rows(),
            a: p.a.clone(),
            experiment: p.experiment.clone(),
        }
    }
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self, ProblemError> {
        ProblemFile::load(path)?.validate()
    }

    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        ProblemFile::parse(text)?.validate()
    }
}
