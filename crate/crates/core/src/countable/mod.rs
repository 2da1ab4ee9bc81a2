//! A Markov jump process on a countable closed 1-periodic set, and the random
//! closed set of its jump times.

mod ladder;
mod process;
mod rates;

pub use ladder::{spacing, LadderSpec, Site, DEFAULT_DEPTH, MAX_DEPTH, MAX_LEVELS};
pub use process::{
    extract_jump_set, jump_set_law, simulate_trajectory, trajectory_with, JumpEvent, JumpKind, JumpSetSampler,
    JumpTrajectory,
};
pub use rates::{validate_spec, RateFunction, DEFAULT_MAX_CANDIDATES};
