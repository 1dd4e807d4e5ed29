//! Replica harnesses, estimators, presets and the eight CLI experiments.
//!
//! Every experiment takes an [`ExperimentConfig`], validates it against the
//! hypotheses of the result it checks, fans replicas out over a worker pool
//! and returns a [`Report`] of CSV tables, a JSON summary and pass/fail
//! checks. Replica results are merged in replica order, so reports do not
//! depend on the number of workers.

mod autocov;
mod compare;
mod concentration;
mod config;
mod convergence;
mod curvature;
pub mod oracle;
pub mod replicas;
pub mod report;
mod schedule;
mod simulate;
pub mod stats;
mod variance;

use std::fmt;
use std::str::FromStr;

use rayon::ThreadPool;

pub use config::{
    preset, DomainKind, ExperimentConfig, ExperimentSection, FamilySection, InitSpec,
    KernelSection, NamedInit, RingKind, RingsSection, SamplerSection, ScheduleSection, TargetKind,
    TargetSection, TestKernelKind, PRESETS,
};
pub use oracle::UniformExample;
pub use replicas::{
    estimate_autocov, estimate_mean, estimate_variance, fold_replicas, map_replicas, summarize,
    thread_pool, MoveTallies, Probe, ReplicaSummary, RunTag,
};
pub use report::{Check, Report, ResultRow, Table, BUILD};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Observable, PiecewiseLaw};
use crate::samplers::{InitialLaw, Proposal, RunConfig, SamplerKind};
use crate::targets::{EnergyRingSpec, Potential};

/// A CLI experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Simulate,
    VerifyVariance,
    VerifyAutocov,
    CompareAutocov,
    KernelDistance,
    Concentration,
    CurvatureReport,
    GoodSequence,
}

impl Command {
    pub const ALL: [Command; 8] = [
        Command::Simulate,
        Command::VerifyVariance,
        Command::VerifyAutocov,
        Command::CompareAutocov,
        Command::KernelDistance,
        Command::Concentration,
        Command::CurvatureReport,
        Command::GoodSequence,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::VerifyVariance => "verify-variance",
            Command::VerifyAutocov => "verify-autocov",
            Command::CompareAutocov => "compare-autocov",
            Command::KernelDistance => "kernel-distance",
            Command::Concentration => "concentration",
            Command::CurvatureReport => "curvature-report",
            Command::GoodSequence => "good-sequence",
        }
    }

    /// The first shipped preset for this command.
    pub fn default_preset(self) -> &'static str {
        PRESETS
            .iter()
            .find(|p| p.1 == self.label())
            .map(|p| p.0)
            .expect("every command has a preset")
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Command {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Command::ALL
            .into_iter()
            .find(|c| c.label() == s)
            .ok_or_else(|| Error::config(format!("unknown experiment {s:?}")))
    }
}

/// What every experiment receives.
pub(crate) struct Ctx<'a> {
    pub cfg: &'a ExperimentConfig,
    pub pool: ThreadPool,
    pub tag: RunTag,
}

impl Ctx<'_> {
    fn report(&self, command: Command) -> Report {
        Report::new(command.label(), self.tag.digest.clone(), self.tag.seed)
    }
}

/// Run `command` on `cfg` with `jobs` workers (all cores when `None`).
pub fn run(command: Command, cfg: &ExperimentConfig, jobs: Option<usize>) -> Result<Report> {
    if let Some(kind) = &cfg.experiment.kind {
        if kind != command.label() {
            return Err(Error::config(format!(
                "config is for {kind:?}, not {:?}",
                command.label()
            )));
        }
    }
    let ctx = Ctx {
        cfg,
        pool: thread_pool(jobs)?,
        tag: RunTag {
            digest: cfg.digest(),
            seed: cfg.seed(),
        },
    };
    let mut report = match command {
        Command::Simulate => simulate::run(&ctx),
        Command::VerifyVariance => variance::run(&ctx),
        Command::VerifyAutocov => autocov::run(&ctx),
        Command::CompareAutocov => compare::run(&ctx),
        Command::KernelDistance => convergence::run(&ctx),
        Command::Concentration => concentration::run(&ctx),
        Command::CurvatureReport => curvature::run(&ctx),
        Command::GoodSequence => schedule::run(&ctx),
    }?;
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    let verdict = match (report.checks.len(), failed) {
        (0, _) => String::new(),
        (n, 0) => format!("; {n} checks pass"),
        (n, k) => format!("; {k} of {n} checks FAIL"),
    };
    report.line = format!(
        "{}: {}{verdict} [digest {}]",
        command,
        report.line,
        &report.digest[..12]
    );
    Ok(report)
}

/// The two-level uniform example: flat target, both levels uniform, an
/// independence proposal and one ring, level 0 started from the
/// equi-energy mixture.
pub(crate) struct UniformSetup {
    pub run: RunConfig,
    pub f: Observable,
    pub domain: Domain,
    /// `λ(f)` and `Var_λ f`.
    pub mean: f64,
    pub variance: f64,
}

impl UniformSetup {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let run = cfg.run_config(0)?;
        let fam = &run.family;
        let ok = run.kind == SamplerKind::EquiEnergy
            && fam.potential() == Potential::Flat
            && fam.len() == 2
            && run.rings == EnergyRingSpec::Full
            && run.proposal == Proposal::Independent
            && run.levels[0].init == InitialLaw::EeMixture
            && run.levels[1].burn_in == 0;
        if !ok {
            return Err(Error::config(
                "the uniform example needs an ee sampler on a flat two-level family with full rings, \
                 an independence proposal, and level 0 started from ee-mixture after level 1",
            ));
        }
        let domain = fam.domain();
        let f = cfg.observable();
        f.certify(domain)?;
        let law = PiecewiseLaw::uniform(domain);
        let breaks = f.breakpoints(domain);
        let mean = law.expect(|x| f.eval(domain, x), &breaks);
        let variance = law.expect(|x| (f.eval(domain, x) - mean).powi(2), &breaks);
        Ok(UniformSetup {
            run,
            f,
            domain,
            mean,
            variance,
        })
    }

    pub fn oracle(&self, p_ee: f64, t_b: usize) -> UniformExample {
        UniformExample::new(p_ee, t_b, self.variance)
    }
}

fn required<T: Clone>(value: &Option<T>, key: &str) -> Result<T> {
    value
        .clone()
        .ok_or_else(|| Error::config(format!("missing experiment.{key}")))
}
