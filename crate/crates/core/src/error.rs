//! Errors. The load-bearing case is [`SeriesError::InsufficientTruncation`]:
//! a coefficient query outside the certified window is distinguishable and
//! carries a truncation spec sufficient to retry, so callers can grow and
//! recompute instead of receiving a silent wrong zero.

use crate::trunc::TruncationSpec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    /// Requested coefficient lies above an exactness window. `needed` is a
    /// sufficient (not necessarily minimal) spec to certify the query.
    #[error("insufficient truncation ({context}); retry with at least {needed}")]
    InsufficientTruncation {
        context: String,
        needed: TruncationSpec,
    },

    #[error("not invertible at this truncation: {0}")]
    NotInvertible(String),

    #[error("substitution does not converge formally: {0}")]
    NonConvergent(String),

    #[error("domain error: {0}")]
    Domain(String),
}

impl SeriesError {
    pub(crate) fn insufficient(context: impl Into<String>, needed: TruncationSpec) -> Self {
        SeriesError::InsufficientTruncation {
            context: context.into(),
            needed,
        }
    }
}

pub type Result<T> = std::result::Result<T, SeriesError>;
