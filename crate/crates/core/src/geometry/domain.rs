use std::fmt;

use crate::error::{Error, Result};

/// Reduce a real number to the unit circle `[0, 1)`.
pub fn wrap(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    // rem_euclid rounds tiny negatives up to exactly 1.0
    if r >= 1.0 {
        0.0
    } else {
        r
    }
}

/// Arc-length distance on the unit-circumference circle.
pub fn circle_distance(x: f64, y: f64) -> f64 {
    let d = (wrap(x) - wrap(y)).abs();
    d.min(1.0 - d)
}

/// A point on the unit-circumference circle.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct CirclePoint(f64);

impl CirclePoint {
    pub fn new(x: f64) -> Self {
        CirclePoint(wrap(x))
    }

    pub fn position(self) -> f64 {
        self.0
    }

    pub fn distance(self, other: CirclePoint) -> f64 {
        circle_distance(self.0, other.0)
    }
}

impl From<f64> for CirclePoint {
    fn from(x: f64) -> Self {
        CirclePoint::new(x)
    }
}

/// The one-dimensional state spaces: the unit circle `[0, 1)` with the wrap
/// metric, or a closed interval with the Euclidean metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    Circle,
    Interval { lo: f64, hi: f64 },
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Circle => write!(f, "circle"),
            Domain::Interval { lo, hi } => write!(f, "interval[{lo}, {hi}]"),
        }
    }
}

impl Domain {
    pub const UNIT_INTERVAL: Domain = Domain::Interval { lo: 0.0, hi: 1.0 };

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::config(format!(
                "interval domain needs finite lo < hi, got [{lo}, {hi}]"
            )));
        }
        Ok(Domain::Interval { lo, hi })
    }

    pub fn is_circle(&self) -> bool {
        matches!(self, Domain::Circle)
    }

    /// Coordinate range; the circle is parametrized by `[0, 1)`.
    pub fn bounds(&self) -> (f64, f64) {
        match *self {
            Domain::Circle => (0.0, 1.0),
            Domain::Interval { lo, hi } => (lo, hi),
        }
    }

    pub fn length(&self) -> f64 {
        let (lo, hi) = self.bounds();
        hi - lo
    }

    /// Largest distance between two points.
    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Circle => 0.5,
            Domain::Interval { lo, hi } => hi - lo,
        }
    }

    pub fn dist(&self, x: f64, y: f64) -> f64 {
        match self {
            Domain::Circle => circle_distance(x, y),
            Domain::Interval { .. } => (x - y).abs(),
        }
    }

    /// Canonical coordinate: wrapped on the circle, unchanged on an interval.
    pub fn normalize(&self, x: f64) -> f64 {
        match self {
            Domain::Circle => wrap(x),
            Domain::Interval { .. } => x,
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        match *self {
            Domain::Circle => x.is_finite(),
            Domain::Interval { lo, hi } => (lo..=hi).contains(&x),
        }
    }

    pub(crate) fn check_same(&self, other: &Domain) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::DomainMismatch(*self, *other))
        }
    }
}
