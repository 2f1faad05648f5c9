//! Truncation requests.

use serde::{Deserialize, Serialize};
use std::fmt;

/// How far a series should be certified exact: q-exponents up to `q_max`,
/// q̃-exponents up to `t_max`, and p-exponents covering at least
/// `[-p_window, p_window]` (where the slice's pole order allows).
///
/// All three bounds are requests for the *top* of the respective windows;
/// lower ends are fixed by pole orders and are not configurable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruncationSpec {
    pub q_max: i64,
    pub t_max: i64,
    pub p_window: i64,
}

impl TruncationSpec {
    pub fn new(q_max: i64, t_max: i64, p_window: i64) -> Self {
        TruncationSpec {
            q_max,
            t_max,
            p_window,
        }
    }

    /// Spec for objects with no q̃-direction.
    pub fn q_only(q_max: i64, p_window: i64) -> Self {
        TruncationSpec::new(q_max, 0, p_window)
    }

    /// Componentwise containment: everything certified under `other` is
    /// certified under `self`.
    pub fn contains(&self, other: &TruncationSpec) -> bool {
        self.q_max >= other.q_max && self.t_max >= other.t_max && self.p_window >= other.p_window
    }

    /// Componentwise maximum.
    pub fn union(&self, other: &TruncationSpec) -> TruncationSpec {
        TruncationSpec::new(
            self.q_max.max(other.q_max),
            self.t_max.max(other.t_max),
            self.p_window.max(other.p_window),
        )
    }
}

impl fmt::Display for TruncationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "(q_max={}, t_max={}, p_window={})",
            self.q_max, self.t_max, self.p_window
        )
    }
}
