//! Monte Carlo harness for the dual-satellite co-location models: scenario
//! files, the power sweep, result files and link-budget audits.

// Negated comparisons also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod crossing;
pub mod error;
pub mod output;
pub mod patterns;
pub mod scenario;
pub mod sweep;

pub use error::{HarnessError, Result};
