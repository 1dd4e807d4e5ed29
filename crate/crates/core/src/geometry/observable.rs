use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Domain;
use crate::error::{Error, Result};

const LIP_TOL: f64 = 1e-12;

/// Real observables on a domain with a known Lipschitz constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Observable {
    /// `x` minus the midpoint of the coordinate range. 1-Lipschitz on an
    /// interval; on the circle it jumps at `0`.
    Centered,
    /// `d(x, a)`.
    DistanceTo(f64),
    /// Linear interpolation through knots sorted by abscissa; constant
    /// beyond the first and last knot.
    PiecewiseLinear(Vec<(f64, f64)>),
}

impl Observable {
    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() || knots.iter().any(|k| !k.0.is_finite() || !k.1.is_finite()) {
            return Err(Error::config(
                "piecewise-linear observable needs finite knots",
            ));
        }
        if knots.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::config(
                "piecewise-linear knots must have increasing abscissae",
            ));
        }
        Ok(Observable::PiecewiseLinear(knots))
    }

    pub fn eval(&self, domain: Domain, x: f64) -> f64 {
        match self {
            Observable::Centered => {
                let (a, b) = domain.bounds();
                domain.normalize(x) - (a + b) / 2.0
            }
            Observable::DistanceTo(a) => domain.dist(x, *a),
            Observable::PiecewiseLinear(knots) => {
                let x = domain.normalize(x);
                let k = knots.partition_point(|p| p.0 <= x);
                if k == 0 {
                    knots[0].1
                } else if k == knots.len() {
                    knots[k - 1].1
                } else {
                    let ((x0, y0), (x1, y1)) = (knots[k - 1], knots[k]);
                    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
                }
            }
        }
    }

    /// Lipschitz constant under the domain metric (`∞` if discontinuous).
    pub fn lipschitz(&self, domain: Domain) -> f64 {
        match self {
            Observable::Centered if domain.is_circle() => f64::INFINITY,
            Observable::Centered | Observable::DistanceTo(_) => 1.0,
            Observable::PiecewiseLinear(knots) => {
                let slope = knots
                    .windows(2)
                    .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
                    .fold(0.0, f64::max);
                if domain.is_circle() {
                    let (f0, f1) = (self.eval(domain, 0.0), self.eval(domain, 1.0 - 1e-15));
                    if (f0 - f1).abs() > 1e-9 {
                        return f64::INFINITY;
                    }
                }
                slope
            }
        }
    }

    /// Fails unless the Lipschitz constant is at most one.
    pub fn certify(&self, domain: Domain) -> Result<()> {
        let lip = self.lipschitz(domain);
        if lip <= 1.0 + LIP_TOL {
            Ok(())
        } else {
            Err(Error::config(format!(
                "observable {self} has Lipschitz constant {lip} > 1 on {domain}"
            )))
        }
    }

    /// Points between which the observable is affine.
    pub fn breakpoints(&self, domain: Domain) -> Vec<f64> {
        match self {
            Observable::Centered => vec![],
            Observable::DistanceTo(a) if domain.is_circle() => {
                let a = domain.normalize(*a);
                vec![a, domain.normalize(a + 0.5)]
            }
            Observable::DistanceTo(a) => vec![*a],
            Observable::PiecewiseLinear(knots) => knots.iter().map(|k| k.0).collect(),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Observable::Centered => f.write_str("identity-centered"),
            Observable::DistanceTo(a) => write!(f, "circle-arc-to-point({a})"),
            Observable::PiecewiseLinear(knots) => {
                f.write_str("pl:")?;
                for (k, (x, y)) in knots.iter().enumerate() {
                    if k > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}:{y}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// Accepts `identity-centered`, `circle-arc-to-point(a)` and
    /// `pl:x0:y0,x1:y1,…`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::config(format!("unknown observable {s:?}"));
        if s == "identity-centered" || s == "centered" {
            return Ok(Observable::Centered);
        }
        if let Some(arg) = s
            .strip_prefix("circle-arc-to-point(")
            .and_then(|r| r.strip_suffix(')'))
        {
            return arg
                .trim()
                .parse()
                .map(Observable::DistanceTo)
                .map_err(|_| bad());
        }
        if let Some(list) = s.strip_prefix("pl:") {
            let knots = list
                .split(',')
                .map(|pair| {
                    let (x, y) = pair.split_once(':').ok_or_else(bad)?;
                    Ok((
                        x.trim().parse().map_err(|_| bad())?,
                        y.trim().parse().map_err(|_| bad())?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            return Observable::piecewise_linear(knots);
        }
        Err(bad())
    }
}

impl TryFrom<String> for Observable {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Observable> for String {
    fn from(o: Observable) -> String {
        o.to_string()
    }
}
