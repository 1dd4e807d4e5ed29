//! Potentials, tempered density ladders and energy rings.

mod density;
mod family;
mod potential;
mod rings;

pub use density::{ExpPiece, PiecewiseDensity, Restriction};
pub use family::{ee_acceptance, tempered_density, Level, TemperedFamily};
pub use potential::{LinearPiece, Potential};
pub use rings::{EnergyRingSpec, RingInterval};
