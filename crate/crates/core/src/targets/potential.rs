use crate::error::{Error, Result};
use crate::geometry::{wrap, Domain};

/// A potential `V`; targets are `π ∝ exp(−β max(H, V))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    Flat,
    /// `M` wells of period `1/M`: `V = 0` on the first half of each period
    /// (the deep, high-density half) and `V = depth` on the second half.
    SquareTooth {
        wells: usize,
        depth: f64,
    },
    /// Period `1/2`, rising with `slope` on `[0, 1/4]` to the peak
    /// `slope/4` and falling back on `[1/4, 1/2]`.
    SawTooth {
        slope: f64,
    },
}

/// `V(x) = start + slope·(x − lo)` on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearPiece {
    pub lo: f64,
    pub hi: f64,
    pub start: f64,
    pub slope: f64,
}

impl LinearPiece {
    pub fn value_at(&self, x: f64) -> f64 {
        self.start + self.slope * (x - self.lo)
    }
}

impl Potential {
    pub fn square_tooth(wells: usize, depth: f64) -> Result<Self> {
        if wells < 2 {
            return Err(Error::config(format!(
                "square tooth needs at least 2 wells, got {wells}"
            )));
        }
        if !(depth >= 0.0 && depth.is_finite()) {
            return Err(Error::config(format!(
                "square tooth depth must be finite and >= 0, got {depth}"
            )));
        }
        Ok(Potential::SquareTooth { wells, depth })
    }

    pub fn saw_tooth(slope: f64) -> Result<Self> {
        if !(slope > 0.0 && slope.is_finite()) {
            return Err(Error::config(format!(
                "saw tooth slope must be positive, got {slope}"
            )));
        }
        Ok(Potential::SawTooth { slope })
    }

    /// `V(x)`; periodic potentials read `x` modulo one.
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Potential::Flat => 0.0,
            Potential::SquareTooth { wells, depth } => {
                let y = wrap(x) * wells as f64;
                if y - y.floor() < 0.5 {
                    0.0
                } else {
                    depth
                }
            }
            Potential::SawTooth { slope } => {
                let y = wrap(x) % 0.5;
                if y <= 0.25 {
                    slope * y
                } else {
                    slope * (0.5 - y)
                }
            }
        }
    }

    /// `(min V, max V)`.
    pub fn range(&self) -> (f64, f64) {
        match *self {
            Potential::Flat => (0.0, 0.0),
            Potential::SquareTooth { depth, .. } => (0.0, depth),
            Potential::SawTooth { slope } => (0.0, slope / 4.0),
        }
    }

    /// Exact decomposition of `V` into affine pieces covering the domain.
    pub fn linear_pieces(&self, domain: Domain) -> Result<Vec<LinearPiece>> {
        let (a, b) = domain.bounds();
        if !domain.is_circle() && !matches!(self, Potential::Flat) {
            return Err(Error::config("periodic potentials live on the circle"));
        }
        Ok(match *self {
            Potential::Flat => vec![LinearPiece {
                lo: a,
                hi: b,
                start: 0.0,
                slope: 0.0,
            }],
            Potential::SquareTooth { wells, depth } => {
                let halves = 2 * wells;
                (0..halves)
                    .map(|k| LinearPiece {
                        lo: k as f64 / halves as f64,
                        hi: (k + 1) as f64 / halves as f64,
                        start: if k % 2 == 0 { 0.0 } else { depth },
                        slope: 0.0,
                    })
                    .collect()
            }
            Potential::SawTooth { slope } => (0..4)
                .map(|k| LinearPiece {
                    lo: k as f64 / 4.0,
                    hi: (k + 1) as f64 / 4.0,
                    start: if k % 2 == 0 { 0.0 } else { slope / 4.0 },
                    slope: if k % 2 == 0 { slope } else { -slope },
                })
                .collect(),
        })
    }
}
