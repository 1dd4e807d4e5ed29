use super::density::{ExpPiece, PiecewiseDensity, Restriction};
use super::potential::{LinearPiece, Potential};
use super::rings::{EnergyRingSpec, RingInterval};
use crate::error::{Error, Result};
use crate::geometry::{Domain, IntervalUnion};

/// Inverse temperature `beta` and energy floor `floor` of one level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub beta: f64,
    pub floor: f64,
}

/// The ladder `π_i ∝ exp(−β_i max(H_i, V))`, level 0 being the target.
#[derive(Debug, Clone)]
pub struct TemperedFamily {
    domain: Domain,
    potential: Potential,
    linear: Vec<LinearPiece>,
    levels: Vec<Level>,
    densities: Vec<PiecewiseDensity>,
}

impl TemperedFamily {
    pub fn new(domain: Domain, potential: Potential, levels: Vec<Level>) -> Result<Self> {
        let Some(first) = levels.first() else {
            return Err(Error::config("a tempered family needs at least one level"));
        };
        if first.beta != 1.0 {
            return Err(Error::config(format!(
                "level 0 must have beta = 1, got {}",
                first.beta
            )));
        }
        if levels
            .iter()
            .any(|l| !(l.beta >= 0.0 && l.beta.is_finite() && l.floor.is_finite()))
        {
            return Err(Error::config(
                "betas must be finite and >= 0, floors finite",
            ));
        }
        if levels.windows(2).any(|w| w[1].beta > w[0].beta) {
            return Err(Error::config(
                "betas must be nonincreasing in the level index",
            ));
        }
        if levels.windows(2).any(|w| w[1].floor < w[0].floor) {
            return Err(Error::config(
                "energy floors must be nondecreasing in the level index",
            ));
        }
        let linear = potential.linear_pieces(domain)?;
        let densities = levels
            .iter()
            .map(|l| PiecewiseDensity::new(domain, tempered_pieces(&linear, *l)))
            .collect::<Result<Vec<_>>>()?;
        Ok(TemperedFamily {
            domain,
            potential,
            linear,
            levels,
            densities,
        })
    }

    /// Levels with the given betas, all floors at `min V`.
    pub fn with_betas(domain: Domain, potential: Potential, betas: &[f64]) -> Result<Self> {
        let floor = potential.range().0;
        Self::new(
            domain,
            potential,
            betas.iter().map(|&beta| Level { beta, floor }).collect(),
        )
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn potential(&self) -> Potential {
        self.potential
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// Number of levels, `𝒦 + 1`.
    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn energy(&self, x: f64) -> f64 {
        self.potential.value(x)
    }

    fn check(&self, i: usize) -> Result<()> {
        if i < self.levels.len() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                index: i,
                levels: self.levels.len(),
            })
        }
    }

    pub fn density(&self, i: usize) -> Result<&PiecewiseDensity> {
        self.check(i)?;
        Ok(&self.densities[i])
    }

    /// `−β_i max(H_i, V(x))`.
    pub fn log_density(&self, i: usize, x: f64) -> Result<f64> {
        self.check(i)?;
        let l = self.levels[i];
        Ok(tempered_log(l, self.energy(x)))
    }

    /// Points whose energy lies in `ring`.
    pub fn ring_preimage(&self, ring: RingInterval) -> IntervalUnion {
        let raw = self.linear.iter().filter_map(|p| {
            if p.slope == 0.0 {
                return ring.contains(p.start).then_some((p.lo, p.hi));
            }
            let at = |h: f64| (p.lo + (h - p.start) / p.slope).clamp(p.lo, p.hi);
            let (a, b) = (at(ring.lo), at(ring.hi));
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            (a < b).then_some((a, b))
        });
        IntervalUnion::new(self.domain, raw.collect::<Vec<_>>())
            .expect("preimage pieces lie inside the domain")
    }

    /// `π_i(V⁻¹(ring))`.
    pub fn ring_mass(&self, i: usize, ring: RingInterval) -> Result<f64> {
        Ok(self.density(i)?.mass(&self.ring_preimage(ring)))
    }

    /// `π_i` restricted to `V⁻¹(ring)`, for repeated exact sampling.
    pub fn ring_restriction(&self, i: usize, ring: RingInterval) -> Result<Restriction> {
        self.density(i)?.restrict(&self.ring_preimage(ring))
    }

    /// Acceptance probability of an equi-energy jump `x → q` at level `i`.
    pub fn ee_acceptance(&self, i: usize, x: f64, q: f64, spec: &EnergyRingSpec) -> Result<f64> {
        self.check(i + 1)?;
        let lx = self.log_density(i, x)?;
        if lx == f64::NEG_INFINITY {
            return Err(Error::ZeroDensity(x));
        }
        let (vx, vq) = (self.energy(x), self.energy(q));
        let mut log_r = self.log_density(i, q)? - lx + self.log_density(i + 1, x)?
            - self.log_density(i + 1, q)?;
        let same_ladder_ring = match spec {
            EnergyRingSpec::Ladder { .. } => spec.ladder_index(vx)? == spec.ladder_index(vq)?,
            EnergyRingSpec::Full => true,
            EnergyRingSpec::Band { .. } => false,
        };
        if !same_ladder_ring {
            let mq = self.ring_mass(i + 1, spec.ring_interval(vq)?)?;
            let mx = self.ring_mass(i + 1, spec.ring_interval(vx)?)?;
            if mq <= 0.0 {
                return Err(Error::ZeroMass);
            }
            // the proposal from x is normalized by x's ring mass
            log_r += mx.ln() - mq.ln();
        }
        Ok(log_r.exp().min(1.0))
    }
}

fn tempered_log(level: Level, v: f64) -> f64 {
    if level.beta == 0.0 {
        0.0
    } else {
        -level.beta * v.max(level.floor)
    }
}

/// Exact log-linear pieces of `exp(−β max(H, V))`.
fn tempered_pieces(linear: &[LinearPiece], level: Level) -> Vec<ExpPiece> {
    let mut out = Vec::with_capacity(linear.len() + 2);
    for p in linear {
        let mut cuts = vec![p.lo, p.hi];
        if p.slope != 0.0 {
            let cross = p.lo + (level.floor - p.start) / p.slope;
            if cross > p.lo && cross < p.hi {
                cuts.insert(1, cross);
            }
        }
        for w in cuts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let mid = p.value_at((a + b) / 2.0);
            let slope = if mid >= level.floor && level.beta != 0.0 {
                -level.beta * p.slope
            } else {
                0.0
            };
            let log_start = if slope == 0.0 {
                tempered_log(level, mid)
            } else {
                tempered_log(level, p.value_at(a))
            };
            out.push(ExpPiece {
                lo: a,
                hi: b,
                log_start,
                slope,
            });
        }
    }
    out
}

/// `π_i(x)`, optionally normalized.
pub fn tempered_density(fam: &TemperedFamily, i: usize, x: f64, normalized: bool) -> Result<f64> {
    let d = fam.density(i)?;
    Ok(if normalized {
        d.density(x)
    } else {
        d.unnormalized(x)
    })
}

/// Free-function form of [`TemperedFamily::ee_acceptance`].
pub fn ee_acceptance(
    fam: &TemperedFamily,
    i: usize,
    x: f64,
    q: f64,
    spec: &EnergyRingSpec,
) -> Result<f64> {
    fam.ee_acceptance(i, x, q, spec)
}
