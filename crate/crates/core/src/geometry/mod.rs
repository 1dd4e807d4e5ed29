//! Metrics, one-dimensional laws and transport distances.

mod domain;
mod law;
mod measure;
mod observable;
mod sets;
mod transport;

pub use domain::{circle_distance, wrap, CirclePoint, Domain};
pub(crate) use law::gauss_legendre;
pub use law::{PiecewiseLaw, UniformPiece};
pub use measure::EmpiricalMeasure;
pub use observable::Observable;
pub use sets::IntervalUnion;
pub use transport::{
    levy_prokhorov, modified_lp, quantile_couple, w1, w1_circle, w1_interval, w1_laws, Cdf,
};
