//! Independent test oracles.
//!
//! Nothing here depends on the library under test: every expected value is
//! computed from first principles (brute-force tallies, closed-form
//! statistics, planted generators) so that agreement means something.

pub mod cosine;
pub mod data;
pub mod grounding;
pub mod mqlgen;
pub mod stats;
pub mod tally;

pub use cosine::cosine_scores;
pub use grounding::unsupported_numbers;
pub use stats::{adjusted_rand_index, quantile_bins, quantile_type7};
