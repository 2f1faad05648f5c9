//! Serialization formats and cache persistence for the k3series CLI.
//! Everything is exact: rationals travel as `"num/den"` strings, never
//! floats, and every document carries the format version and convention tag.

pub mod cache;
pub mod emit;
