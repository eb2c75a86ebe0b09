// Copyright 2026 The reslab Authors
// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("fit did not converge after {iterations} iterations (last iterate {last:?})")]
    NotConverged { iterations: usize, last: Vec<f64> },

    #[error("unphysical parameters: {0}")]
    Unphysical(String),

    #[error("inconsistent geometry: {0}")]
    InconsistentGeometry(String),

    #[error("infinite quality factor: total loss is zero")]
    InfiniteQ,

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateGeometry(_)
                | Error::DegenerateFit(_)
                | Error::NotConverged { .. }
                | Error::InconsistentGeometry(_)
                | Error::InfiniteQ
        )
    }
}
