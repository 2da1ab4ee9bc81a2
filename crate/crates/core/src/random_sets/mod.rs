//! Samplers and set-level geometry for random closed subsets of `[0, t]`.

mod bessel;
mod brownian;
mod dimension;
mod geometry;
mod poisson;
mod sample;
mod subordinator;

pub use bessel::{bridge_hit_probability, sample_bessel_zero_set, BesselScheme, BesselZeroSampler};
pub use brownian::{
    brownian_path_with, extract_level_set, sample_brownian_path, BrownianLevelSampler, PathSample, DEFAULT_BAND,
};
pub use dimension::{box_counts, default_scales, estimate_box_dimension, fit_box_dimension, DimensionEstimate};
pub use geometry::{derived_set, hausdorff_distance, rescale, time_reverse};
pub use poisson::PoissonPointSampler;
pub use sample::{PointKind, SetSample, SetSampler, Side};
pub use subordinator::{
    gaps_longer_than, rank_size_slope, sample_subordinator_range, subordinator_range_with, SubordinatorParams,
    SubordinatorSampler, DEFAULT_RELATIVE_CUTOFF,
};
