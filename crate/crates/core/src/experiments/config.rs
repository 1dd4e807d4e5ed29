use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Observable};
use crate::samplers::{InitialLaw, LevelSchedule, Proposal, RunConfig, SamplerKind};
use crate::targets::{EnergyRingSpec, Level, Potential, TemperedFamily};

/// A complete experiment description, as read from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub target: TargetSection,
    #[serde(default)]
    pub family: FamilySection,
    #[serde(default)]
    pub rings: RingsSection,
    pub sampler: Option<SamplerSection>,
    #[serde(default)]
    pub experiment: ExperimentSection,
    pub kernel: Option<KernelSection>,
    pub schedule: Option<ScheduleSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetKind {
    #[default]
    Flat,
    SquareTooth,
    SawTooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    #[default]
    Circle,
    Interval,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSection {
    #[serde(default)]
    pub kind: TargetKind,
    #[serde(default)]
    pub domain: DomainKind,
    /// Interval end points, `[0, 1]` when absent.
    pub bounds: Option<[f64; 2]>,
    #[serde(rename = "M")]
    pub wells: Option<usize>,
    #[serde(rename = "H")]
    pub depth: Option<f64>,
    /// Saw-tooth slope.
    #[serde(rename = "C")]
    pub slope: Option<f64>,
}

impl TargetSection {
    pub fn domain(&self) -> Result<Domain> {
        match (self.domain, self.bounds) {
            (DomainKind::Circle, None) => Ok(Domain::Circle),
            (DomainKind::Circle, Some(_)) => Err(Error::config("the circle takes no bounds")),
            (DomainKind::Interval, None) => Ok(Domain::UNIT_INTERVAL),
            (DomainKind::Interval, Some([lo, hi])) => Domain::interval(lo, hi),
        }
    }

    pub fn potential(&self) -> Result<Potential> {
        let need = |what: &str| Error::config(format!("target {:?} needs {what}", self.kind));
        match self.kind {
            TargetKind::Flat => Ok(Potential::Flat),
            TargetKind::SquareTooth => Potential::square_tooth(
                self.wells.ok_or_else(|| need("M"))?,
                self.depth.ok_or_else(|| need("H"))?,
            ),
            TargetKind::SawTooth => Potential::saw_tooth(self.slope.ok_or_else(|| need("C"))?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySection {
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    /// Energy ladder `H_0 < H_1 < …` used by ladder rings.
    pub cuts: Option<Vec<f64>>,
    /// Per-level energy floors; all at `min V` when absent.
    pub floors: Option<Vec<f64>>,
}

fn default_betas() -> Vec<f64> {
    vec![1.0]
}

impl Default for FamilySection {
    fn default() -> Self {
        FamilySection {
            betas: default_betas(),
            cuts: None,
            floors: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RingKind {
    #[default]
    Full,
    Ladder,
    Band,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingsSection {
    #[serde(default)]
    pub kind: RingKind,
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedInit {
    Uniform,
    Target,
    EeMixture,
}

/// A level's initial law: a point or one of the named laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InitSpec {
    Point(f64),
    Named(NamedInit),
}

impl From<InitSpec> for InitialLaw {
    fn from(s: InitSpec) -> Self {
        match s {
            InitSpec::Point(x) => InitialLaw::Point(x),
            InitSpec::Named(NamedInit::Uniform) => InitialLaw::Uniform,
            InitSpec::Named(NamedInit::Target) => InitialLaw::Target,
            InitSpec::Named(NamedInit::EeMixture) => InitialLaw::EeMixture,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub kind: SamplerKind,
    #[serde(default)]
    pub p_ee: f64,
    /// Ball radius; an independence proposal when absent.
    pub c: Option<f64>,
    pub t_end: Option<usize>,
    /// Per-level burn-ins, all zero when absent.
    #[serde(default)]
    pub burnins: Vec<usize>,
    /// Per-level initial laws, all uniform when absent.
    #[serde(default)]
    pub init: Vec<InitSpec>,
}

/// Knobs shared by the experiment kinds; each kind reads the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub kind: Option<String>,
    pub f: Option<Observable>,
    #[serde(rename = "T", default)]
    pub t: Vec<usize>,
    #[serde(rename = "Tb")]
    pub t_b: Option<usize>,
    #[serde(default)]
    pub lags: Vec<usize>,
    pub replicas: Option<usize>,
    pub seed: Option<u64>,
    /// Sweep of `p_ee` values.
    pub p_ees: Option<Vec<f64>>,
    /// Autocorrelation level whose first crossing is reported.
    pub threshold: Option<f64>,
    /// Autocovariance window length.
    pub window: Option<usize>,
    /// Perturbation sizes as fractions of `δ_max`.
    pub deltas: Option<Vec<f64>>,
    pub r_points: Option<usize>,
    /// Starting point of test-kernel chains.
    pub x0: Option<f64>,
    /// Number of grid points for kernel distances and curvature.
    pub grid: Option<usize>,
    /// Discretization cells for grid chains.
    pub cells: Option<usize>,
    pub radii: Option<Vec<f64>>,
    pub wells: Option<Vec<usize>>,
    pub depths: Option<Vec<f64>>,
    /// Restrict the parallel-tempering curve to replicas in the core event.
    pub condition_pt: Option<bool>,
    pub min_conditioned: Option<usize>,
    /// Samplers compared by compare-autocov.
    pub samplers: Option<Vec<SamplerKind>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestKernelKind {
    LazyUniform,
}

/// An explicit test kernel for the concentration and curvature experiments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub kind: TestKernelKind,
    pub c: f64,
    pub p: f64,
}

/// Constants of the good-sequence schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    pub k: u32,
    pub alpha: f64,
    pub lipschitz: f64,
    pub m: f64,
    pub covering: f64,
    pub b: f64,
    pub p_ee: f64,
    pub eps0: f64,
    pub delta: f64,
    pub g0: f64,
    pub levels: usize,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configs serialize")
    }

    /// SHA-256 of the canonical TOML form, in hex.
    pub fn digest(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn seed(&self) -> u64 {
        self.experiment.seed.unwrap_or(0)
    }

    pub fn domain(&self) -> Result<Domain> {
        self.target.domain()
    }

    pub fn family(&self) -> Result<TemperedFamily> {
        let domain = self.target.domain()?;
        let potential = self.target.potential()?;
        let betas = &self.family.betas;
        match &self.family.floors {
            None => TemperedFamily::with_betas(domain, potential, betas),
            Some(floors) if floors.len() == betas.len() => TemperedFamily::new(
                domain,
                potential,
                betas
                    .iter()
                    .zip(floors)
                    .map(|(&beta, &floor)| Level { beta, floor })
                    .collect(),
            ),
            Some(floors) => Err(Error::config(format!(
                "{} floors for {} betas",
                floors.len(),
                betas.len()
            ))),
        }
    }

    pub fn rings(&self) -> Result<EnergyRingSpec> {
        match self.rings.kind {
            RingKind::Full => Ok(EnergyRingSpec::Full),
            RingKind::Band => EnergyRingSpec::band(
                self.rings
                    .eps
                    .ok_or_else(|| Error::config("band rings need eps"))?,
            ),
            RingKind::Ladder => match (&self.family.cuts, self.target.potential()?) {
                (Some(cuts), _) => EnergyRingSpec::ladder(cuts.iter().copied()),
                (None, Potential::SquareTooth { depth, .. }) if depth > 0.0 => {
                    EnergyRingSpec::ladder([0.0, depth])
                }
                (None, _) => Err(Error::config("ladder rings need family.cuts")),
            },
        }
    }

    pub fn sampler(&self) -> Result<&SamplerSection> {
        self.sampler
            .as_ref()
            .ok_or_else(|| Error::config("missing [sampler] section"))
    }

    pub fn proposal(&self) -> Result<Proposal> {
        Ok(match self.sampler()?.c {
            Some(radius) => Proposal::Ball { radius },
            None => Proposal::Independent,
        })
    }

    /// The sampler run, with `t_end` taken from the config or `default_end`.
    pub fn run_config(&self, default_end: usize) -> Result<RunConfig> {
        let s = self.sampler()?;
        let family = self.family()?;
        let n = family.len();
        let burn = |i: usize| s.burnins.get(i).copied().unwrap_or(0);
        let init = |i: usize| {
            s.init
                .get(i)
                .copied()
                .map_or(InitialLaw::Uniform, InitialLaw::from)
        };
        if s.burnins.len() > n || s.init.len() > n {
            return Err(Error::config(format!(
                "more burn-ins or initial laws than the {n} levels"
            )));
        }
        let cfg = RunConfig {
            kind: s.kind,
            family,
            rings: self.rings()?,
            proposal: self.proposal()?,
            p_ee: s.p_ee,
            levels: (0..n)
                .map(|i| LevelSchedule {
                    burn_in: burn(i),
                    init: init(i),
                })
                .collect(),
            t_end: s.t_end.unwrap_or(default_end),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn observable(&self) -> Observable {
        self.experiment.f.clone().unwrap_or(Observable::Centered)
    }

    pub fn replicas(&self, default: usize) -> usize {
        self.experiment.replicas.unwrap_or(default)
    }

    pub fn kernel(&self) -> Result<&KernelSection> {
        self.kernel
            .as_ref()
            .ok_or_else(|| Error::config("missing [kernel] section"))
    }
}

/// Named configurations shipped with the crate: `(name, command, toml)`.
pub const PRESETS: &[(&str, &str, &str)] = &[
    (
        "uniform46",
        "verify-variance",
        include_str!("../../presets/uniform46.toml"),
    ),
    (
        "uniform46-autocov",
        "verify-autocov",
        include_str!("../../presets/uniform46-autocov.toml"),
    ),
    (
        "uniform46-kernel",
        "kernel-distance",
        include_str!("../../presets/uniform46-kernel.toml"),
    ),
    (
        "lazy-uniform",
        "concentration",
        include_str!("../../presets/lazy-uniform.toml"),
    ),
    (
        "square-tooth",
        "compare-autocov",
        include_str!("../../presets/square-tooth.toml"),
    ),
    (
        "square-tooth-flat",
        "compare-autocov",
        include_str!("../../presets/square-tooth-flat.toml"),
    ),
    (
        "spectral",
        "curvature-report",
        include_str!("../../presets/spectral.toml"),
    ),
    (
        "schedule",
        "good-sequence",
        include_str!("../../presets/schedule.toml"),
    ),
    (
        "square-tooth-trace",
        "simulate",
        include_str!("../../presets/square-tooth-trace.toml"),
    ),
];

pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let (_, _, text) = PRESETS
        .iter()
        .find(|p| p.0 == name)
        .ok_or_else(|| Error::config(format!("unknown preset {name:?}")))?;
    ExperimentConfig::from_toml(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn presets_parse_and_round_trip() {
        for (name, _, _) in PRESETS {
            let cfg = preset(name).unwrap();
            let again = ExperimentConfig::from_toml(&cfg.to_toml()).unwrap();
            assert_eq!(cfg, again, "{name}");
            assert_eq!(cfg.digest(), again.digest());
        }
        assert!(preset("nope").is_err());
    }

    #[test]
    fn builds_a_run() {
        let cfg = ExperimentConfig::from_toml(
            r#"
            [target]
            kind = "square-tooth"
            M = 4
            H = 3.0
            [family]
            betas = [1.0, 0.2]
            [rings]
            kind = "ladder"
            [sampler]
            kind = "ee"
            p_ee = 0.1
            c = 0.05
            t_end = 100
            burnins = [10, 0]
            init = [0.1, "target"]
            "#,
        )
        .unwrap();
        let run = cfg.run_config(0).unwrap();
        assert_eq!(run.rings, EnergyRingSpec::ladder([0.0, 3.0]).unwrap());
        assert_eq!(run.levels[0].init, InitialLaw::Point(0.1));
        assert_eq!(run.levels[1].init, InitialLaw::Target);
        assert_eq!(run.t_end, 100);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml("[target]\nkind = \"cube\"").is_err());
        assert!(ExperimentConfig::from_toml("[sampler]\nkind = \"ee\"\nbogus = 1").is_err());
        let cfg = ExperimentConfig::from_toml("[target]\nkind = \"square-tooth\"\nM = 4").unwrap();
        assert!(cfg.family().is_err());
        let cfg = ExperimentConfig::from_toml("[sampler]\nkind = \"mh\"\nc = 0.7").unwrap();
        assert!(cfg.run_config(10).is_err());
        let cfg = ExperimentConfig::from_toml("[experiment]\nf = \"pl:0:0,0:1\"");
        assert!(cfg.is_err());
    }

    #[test]
    fn digest_tracks_content() {
        let a = preset("uniform46").unwrap();
        let mut b = a.clone();
        b.experiment.seed = Some(a.seed() + 1);
        assert_ne!(a.digest(), b.digest());
        assert_eq!(a.digest().len(), 64);
    }
}
