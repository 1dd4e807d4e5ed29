use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::moves::Proposal;
use crate::error::{Error, Result};
use crate::targets::{EnergyRingSpec, TemperedFamily};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SamplerKind {
    /// Independent Metropolis chains, one per level.
    Mh,
    EquiEnergy,
    /// Equi-energy moves drawn from the exact restricted `π_{i+1}`.
    Limiting,
    /// Two levels exchanging states.
    ParallelTempering,
}

impl SamplerKind {
    pub fn label(self) -> &'static str {
        match self {
            SamplerKind::Mh => "mh",
            SamplerKind::EquiEnergy => "ee",
            SamplerKind::Limiting => "limiting",
            SamplerKind::ParallelTempering => "pt",
        }
    }
}

impl fmt::Display for SamplerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SamplerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mh" => Ok(SamplerKind::Mh),
            "ee" | "equi-energy" => Ok(SamplerKind::EquiEnergy),
            "limiting" => Ok(SamplerKind::Limiting),
            "pt" | "parallel-tempering" => Ok(SamplerKind::ParallelTempering),
            _ => Err(Error::config(format!("unknown sampler kind {s:?}"))),
        }
    }
}

impl TryFrom<String> for SamplerKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SamplerKind> for String {
    fn from(k: SamplerKind) -> String {
        k.label().to_owned()
    }
}

/// Law of a level's first state, drawn when its burn-in ends.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialLaw {
    Point(f64),
    /// Lebesgue measure on the domain.
    Uniform,
    /// Exact draw from the level's own target.
    Target,
    /// `(1 − p_ee)·λ + p_ee·Unif(history of the level above)`.
    EeMixture,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelSchedule {
    pub burn_in: usize,
    pub init: InitialLaw,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub kind: SamplerKind,
    pub family: TemperedFamily,
    pub rings: EnergyRingSpec,
    pub proposal: Proposal,
    pub p_ee: f64,
    pub levels: Vec<LevelSchedule>,
    pub t_end: usize,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let domain = self.family.domain();
        if self.levels.len() != self.family.len() {
            return Err(Error::config(format!(
                "{} level schedules for a family of {} levels",
                self.levels.len(),
                self.family.len()
            )));
        }
        if !(0.0..=1.0).contains(&self.p_ee) {
            return Err(Error::config(format!(
                "p_ee must lie in [0, 1], got {}",
                self.p_ee
            )));
        }
        self.proposal.validate(domain)?;
        if self.levels.windows(2).any(|w| w[0].burn_in < w[1].burn_in) {
            return Err(Error::config(
                "burn-ins must be nonincreasing in the level index",
            ));
        }
        if self.t_end < self.levels[0].burn_in {
            return Err(Error::config(format!(
                "t_end = {} precedes the level-0 burn-in {}",
                self.t_end, self.levels[0].burn_in
            )));
        }
        for (i, l) in self.levels.iter().enumerate() {
            match l.init {
                InitialLaw::Point(x) if !domain.contains(x) => {
                    return Err(Error::config(format!(
                        "initial point {x} of level {i} lies outside {domain}"
                    )));
                }
                InitialLaw::EeMixture if i + 1 == self.levels.len() => {
                    return Err(Error::config("the top level has no history to mix in"));
                }
                _ => {}
            }
        }
        if let EnergyRingSpec::Ladder { cuts } = &self.rings {
            let vmin = self.family.potential().range().0;
            if cuts[0] > vmin {
                return Err(Error::config(format!(
                    "lowest ring cut {} exceeds min V = {vmin}",
                    cuts[0]
                )));
            }
        }
        if self.kind == SamplerKind::ParallelTempering {
            let lv = self.family.levels();
            if lv.len() != 2 {
                return Err(Error::config("parallel tempering runs exactly two levels"));
            }
            if lv[0].beta <= lv[1].beta {
                return Err(Error::config("parallel tempering needs beta_0 > beta_1"));
            }
            if self.levels[0].burn_in != self.levels[1].burn_in {
                return Err(Error::config("parallel tempering levels share one burn-in"));
            }
        }
        Ok(())
    }
}
