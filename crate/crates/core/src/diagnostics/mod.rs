//! Curvature geometry of Markov kernels, discretized spectral analysis and
//! evaluators for the closed-form bounds.
//!
//! Kernels implement [`Kernel`]; those with a piecewise-flat one-step law
//! expose it, and every estimator then computes exactly instead of sampling.

pub mod bounds;
mod chain;
mod estimate;
mod kernel;
pub mod schedule;

pub use bounds::{
    bias_bound, cheeger_upper, concentration_bound_thm31, ee_autocov_bound, joulin_ollivier_v2,
    power_bound, power_pair_bound, pt_autocov_lower, relaxation_sandwich, wasserstein_mixing_bound,
    ConcentrationParams, EeAutocovBound, JoulinOllivier, Lambda,
};
pub use chain::{DiscretizedChain, DEFAULT_CELLS};
pub use estimate::{
    coarse_diffusion, curvature, default_dictionary, eccentricity, global_curvature, granularity,
    kernel_distance, kernel_w1, local_dimension, mean_square_distance, uniform_grid, Estimate,
    KernelDistance, DEFAULT_GRID, DEFAULT_SAMPLES,
};
pub use kernel::{
    ConstantKernel, EmpiricalEeKernel, IdentityKernel, Kernel, LazyUniformKernel, LimitingEeKernel,
    MhKernel,
};
pub use schedule::{check_good_sequence, good_sequence, ScheduleConstants, ScheduleLevel};
