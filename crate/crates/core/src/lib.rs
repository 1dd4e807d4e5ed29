//! Multi-level adaptive MCMC on one-dimensional state spaces.
//!
//! The crate covers four layers:
//!
//! * [`geometry`]: the circle and interval metrics, empirical and mixed
//!   one-dimensional laws, exact Wasserstein-1 and Lévy–Prokhorov distances,
//!   quantile couplings and interval-union set algebra.
//! * [`targets`]: square-tooth, saw-tooth and flat potentials, tempered
//!   density ladders with exact piecewise integration, energy rings.
//! * [`samplers`]: random-walk Metropolis, the equi-energy sampler, its
//!   limiting chain and two-temperature parallel tempering, all driven by
//!   counter-based random streams so that runs are reproducible.
//! * [`diagnostics`]: Ollivier curvature, coarse diffusion, granularity,
//!   local dimension, kernel distances, discretized chains (relaxation time,
//!   bottleneck constants) and closed-form concentration / mixing bounds.
//!
//! [`experiments`] wires these into replica harnesses, estimators, presets
//! and CSV/JSON persistence; the `eelab` binary is a thin CLI over it.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod rng;
pub mod samplers;
pub mod targets;

pub use error::{Error, Result};
