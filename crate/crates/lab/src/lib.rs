//! Batch experiment driver: configuration, seeded parallel sampling,
//! diagnostics and report files.

pub mod algebra_suite;
pub mod config;
pub mod experiments;
pub mod parallel;
pub mod report;

pub use config::ExperimentConfig;
pub use experiments::{compute, run_experiment};
pub use report::{Outcome, ReportRow};
