//! Exact formal Laurent-series engine for K3 counting theories.
//!
//! Everything is computed over arbitrary-precision rationals; there is no
//! floating point anywhere. Series values carry per-slice exactness windows:
//! a coefficient is either certified equal to the true one, certified zero
//! (below a valuation bound), or the query fails with an "insufficient
//! truncation" error that tells the caller how to retry. Wrong silent zeros
//! are structurally impossible.
//!
//! Layers, bottom up:
//! - [`plaurent`], [`qseries`], [`triseries`]: windowed Laurent arithmetic in
//!   p, then q, then q̃.
//! - [`forms`]: the named objects Δ, E₂, Θ², G, ℘, φ₁₀,₁ and the Göttsche
//!   numbers.
//! - [`igusa`]: the Igusa cusp form χ₁₀ as the additive (Maass) lift of
//!   φ₁₀,₁ = Θ²Δ, the expansion of 1/χ₁₀, and the coefficient table c(h,n,m).
//! - [`theory`]: Quot-scheme Euler numbers Q_{n,h,m} = [Gⁿ/(Θ²Δ)], the
//!   wall-crossing relation DTₙ = Hₙ − χ(S⁽ⁿ⁾)Qₙ, multiple-cover divisor
//!   sums, and the Mukai-pairing lookup.
//! - [`verify`]: runnable cross-checks of the theory-level identities.
//!
//! Conventions (also stamped into every emitted table via
//! [`CONVENTION_TAG`]): all p-poles are expanded in ascending powers of p
//! (the region |p| < 1), q and q̃ ascending; DT coefficients are stored in
//! the (−p)^m sign convention.

pub mod error;
pub mod forms;
pub mod igusa;
pub mod plaurent;
pub mod qseries;
pub mod rational;
pub mod theory;
pub mod triseries;
pub mod trunc;
pub mod verify;
pub mod window;

pub use error::{Result, SeriesError};
pub use plaurent::PLaurent;
pub use qseries::QSeries;
pub use rational::Rational;
pub use triseries::TriSeries;
pub use trunc::TruncationSpec;

/// Identifies the fixed expansion conventions. Caches and emitted tables
/// carry this tag; loading data written under a different tag is a hard
/// error, never a silent reinterpretation.
pub const CONVENTION_TAG: &str = "p-ascending;dt-sign:(-p)^m;v1";

/// Cache/table format version.
pub const FORMAT_VERSION: u32 = 1;
