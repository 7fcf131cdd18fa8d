#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod chisq;
pub mod cli;
pub mod datasets;
pub mod discrepancy;
pub mod error;
pub mod experiments;
pub mod mixture;
pub mod projection;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
