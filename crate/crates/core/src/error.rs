// Copyright 2026 the pmoments authors
// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

/// Errors raised by the invariant engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("accuracy error: {0}")]
    Accuracy(String),
    /// A checked mathematical invariant failed; `witness` locates the failure.
    #[error("invariant violation [{property}]: {witness}")]
    Invariant { property: String, witness: String },
    #[error("structure error: {0}")]
    Structure(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("unsupported model: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn invariant(property: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::Invariant {
            property: property.into(),
            witness: witness.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
