mod kernel;

pub use kernel::{graded_rule, LaguerreField};
mod expansion;
mod grid;
mod report;

pub use expansion::{
    expand, ktype_sparsity, multiplicity_profile, parseval_sum, parseval_weight,
    quarter_power_multiplier, quarter_power_norm, HarmonicExpansion, TAIL_TOLERANCE,
    Y_MEASURE_SCALE,
};
pub use grid::{
    harmonic_labels, parity_sign, phi_map, pullback_at, pullback_with_sign, twisted_pullback,
    ProductSphereGrid, PullbackSamples, WALL_TOLERANCE,
};
pub use report::{
    branching_consistency, parity_wall_residual, profile_id, wall_residual_with_sign,
    BranchingOptions, BranchingReport, Deviations, DEFAULT_CUTOFF,
};
