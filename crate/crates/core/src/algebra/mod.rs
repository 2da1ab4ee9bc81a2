//! Finite models of the Hilbert spaces `L2(C_t, P)` on a cell grid: vectors
//! relative to a reference law, tensor cuts, vector measures, units, and the
//! projection and multiplication operators built from them.

mod derived;
mod ops;
mod vector;

pub use derived::{asymmetry_statistic, derived_measure, project_qprime_e, AsymmetryTally, DerivedStructure, Profile};
pub use ops::{
    norm_q_diff, norm_u_diff, op_u_p, op_u_p_n_u, project_q, project_q_e, self_adjoint_norm, ElementarySet,
    UnitVector, MAX_DENSE_CELLS, POWER_MAX_ITER, POWER_TOL,
};
pub use vector::{unit_v, vector_measure, PatternVector, VectorMeasure};
