//! Bayesian sparse recovery of narrowband interference in interleaved
//! SC-FDMA uplinks.

// `!(x > 0.0)` style guards also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod gini;
pub mod harness;
pub mod linalg;
pub mod nbi;
pub mod pipeline;
pub mod qam;
pub mod sabmp;
pub mod scfdma;
pub mod sparsify;

pub use error::{Error, Result};
