//! Cell-pattern laws of random sets and the statistical checks run on them.

mod diagnostic;
mod law;
mod pattern;
pub mod stats;

pub use diagnostic::{
    equivalence_diagnostic, intensity_from_atom, pattern_slope, poisson_block_check, singularity_diagnostic, support_diagnostic,
    two_sample_chi_square, DetailRow, Diagnostic, SingularityOptions, Verdict,
};
pub use law::{estimate_law, estimate_law_range, product_law, EmpiricalLaw};
pub use pattern::{discretize, CellPattern};
