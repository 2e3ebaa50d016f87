//! Cognitive market pipeline: state vectors, macro indices, affect dynamics,
//! regime-switched volatility, strategy and backtest, plus the statistics and
//! text-texture tooling used to validate them.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod affect;
pub mod backtest;
pub mod cogvec;
pub mod error;
pub mod fixtures;
pub mod garch;
pub mod ingest;
pub mod macrostate;
pub mod stats;
pub mod strategy;
pub mod textlab;

pub use error::{Error, ErrorKind, Result};
