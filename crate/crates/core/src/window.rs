//! Exactness-window bookkeeping shared by all three series layers.
//!
//! A window `[low, high]` on an exponent axis certifies two facts about the
//! *true* series:
//!   - no nonzero coefficient exists below `low`;
//!   - every stored coefficient at an exponent in `[low, high]` equals the
//!     true one (absent entry = zero there).
//!
//! Above `high` nothing is claimed. Two sentinel uses of [`ENTIRE`]:
//!   - `high == ENTIRE`: the slice is exactly known at *every* exponent
//!     (a fully-known Laurent polynomial, e.g. a Θ² slice);
//!   - `low == ENTIRE`: the series is certified zero everywhere (every
//!     exponent is "below low").
//!
//! An empty window (`high < low`) certifies only the sub-`low` zeros.

/// Effectively-infinite exponent bound. Far beyond any reachable exponent,
/// and small enough that window sums cannot overflow.
pub const ENTIRE: i64 = i64::MAX / 4;

/// Window-bound addition: `ENTIRE` absorbs (a product against an
/// exactly-zero or fully-known factor stays exactly known).
pub fn wadd(a: i64, b: i64) -> i64 {
    if a >= ENTIRE || b >= ENTIRE {
        ENTIRE
    } else {
        (a + b).min(ENTIRE)
    }
}

/// Clamp a finite request against the sentinel.
pub fn wcap(x: i64) -> i64 {
    x.min(ENTIRE)
}
