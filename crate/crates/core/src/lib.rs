//! Random closed subsets of a time interval and the finite models built on
//! them: samplers, cell-pattern laws with their diagnostics, the countable
//! jump process, and pattern-indexed vectors with their operators.

pub mod algebra;
pub mod countable;
pub mod error;
pub mod measure;
pub mod random_sets;
pub mod rng;

pub use error::{Error, Result};
