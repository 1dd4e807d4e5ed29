use std::collections::BTreeMap;

use rayon::prelude::*;
use rayon::ThreadPool;
use serde::Serialize;

use super::report::ResultRow;
use super::stats::{mean_se, variance_jackknife};
use crate::error::{Error, Result};
use crate::geometry::Observable;
use crate::samplers::{MoveKind, MultiLevelRun, RunConfig};
use crate::targets::EnergyRingSpec;

/// Worker pool of `jobs` threads (rayon's default when `None`).
pub fn thread_pool(jobs: Option<usize>) -> Result<ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        if j == 0 {
            return Err(Error::config("--jobs must be at least 1"));
        }
        builder = builder.num_threads(j);
    }
    builder
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))
}

/// `f(0), …, f(count − 1)` computed on `pool`, in replica order.
pub fn map_replicas<T: Send>(
    pool: &ThreadPool,
    count: usize,
    f: impl Fn(u64) -> Result<T> + Sync,
) -> Result<Vec<T>> {
    pool.install(|| (0..count as u64).into_par_iter().map(&f).collect())
}

/// Fold replica results into `acc` in replica order, holding at most
/// `batch` results at once. The result is independent of the thread count.
pub fn fold_replicas<T: Send, A>(
    pool: &ThreadPool,
    count: usize,
    batch: usize,
    f: impl Fn(u64) -> Result<T> + Sync,
    mut acc: A,
    mut merge: impl FnMut(&mut A, u64, T),
) -> Result<A> {
    let batch = batch.max(1) as u64;
    let mut start = 0u64;
    while start < count as u64 {
        let end = (start + batch).min(count as u64);
        let part: Vec<T> =
            pool.install(|| (start..end).into_par_iter().map(&f).collect::<Result<_>>())?;
        for (r, x) in (start..).zip(part) {
            merge(&mut acc, r, x);
        }
        start = end;
    }
    Ok(acc)
}

/// Move counts keyed by `level/kind`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MoveTallies(pub BTreeMap<String, u64>);

impl MoveTallies {
    fn from_counts(counts: &[[u64; MoveKind::ALL.len()]]) -> Self {
        let mut map = BTreeMap::new();
        for (level, row) in counts.iter().enumerate() {
            for (kind, &n) in MoveKind::ALL.iter().zip(row) {
                if n > 0 {
                    map.insert(format!("{level}/{kind}"), n);
                }
            }
        }
        MoveTallies(map)
    }

    pub fn merge(&mut self, other: &MoveTallies) {
        for (k, v) in &other.0 {
            *self.0.entry(k.clone()).or_default() += v;
        }
    }

    pub fn get(&self, level: usize, kind: MoveKind) -> u64 {
        self.0.get(&format!("{level}/{kind}")).copied().unwrap_or(0)
    }
}

/// What to record from one level of a run.
#[derive(Debug, Clone)]
pub struct Probe {
    pub observable: Observable,
    pub level: usize,
    /// Averages `π̂_{T,T_b}` over `(T_b, T_b + T]` for each `T` in `horizons`.
    pub t_b: usize,
    pub horizons: Vec<usize>,
    /// Pairs `(f(X_T), f(X_{T+S}))` with `T = anchor` and `S ∈ lags`.
    pub anchor: Option<usize>,
    pub lags: Vec<usize>,
    /// `(p_ee, λ(f))` to also record `E[f(X_{T+S}) | past]`, valid when
    /// every jump is accepted and the non-jump move is a fresh uniform draw:
    /// `E[f(X_b) | past] = (1 − p)λ(f) + p·mean f(level-1 states < b)`.
    pub conditional: Option<(f64, f64)>,
}

impl Probe {
    /// Last time the probe reads.
    pub fn end(&self) -> usize {
        let avg = self.t_b + self.horizons.iter().copied().max().unwrap_or(0);
        let pairs = self
            .anchor
            .map_or(0, |a| a + self.lags.iter().copied().max().unwrap_or(0));
        avg.max(pairs)
    }
}

/// Per-replica record of a probed run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicaSummary {
    pub replica: u64,
    /// `π̂_{T,T_b}(f)` per horizon.
    pub pi_hat: Vec<f64>,
    /// `(f(X_T), f(X_{T+S}))` per lag.
    pub pairs: Vec<(f64, f64)>,
    /// `E[f(X_{T+S}) | past]` per lag, when requested.
    pub conditional: Vec<f64>,
    /// Final occupancy of each ladder ring (one entry for full rings) in the
    /// history of the level above the probe.
    pub rings: Vec<usize>,
    pub tallies: MoveTallies,
}

/// Run one replica to `cfg.t_end` and record what `probe` asks for.
pub fn summarize(
    cfg: &RunConfig,
    probe: &Probe,
    seed: u64,
    replica: u64,
) -> Result<ReplicaSummary> {
    if cfg.t_end < probe.end() {
        return Err(Error::config(format!(
            "t_end = {} ends before the probe at {}",
            cfg.t_end,
            probe.end()
        )));
    }
    if probe.anchor.is_some_and(|a| a < probe.t_b) {
        return Err(Error::config("the lag anchor precedes the burn-in"));
    }
    let domain = cfg.family.domain();
    let f = |x: f64| probe.observable.eval(domain, x);
    let mut counts = vec![[0u64; MoveKind::ALL.len()]; cfg.levels.len()];
    let mut running = 0.0;
    let mut pi_hat = vec![f64::NAN; probe.horizons.len()];
    let mut anchor_value = f64::NAN;
    let mut pairs = vec![(f64::NAN, f64::NAN); probe.lags.len()];
    let mut conditional = vec![
        f64::NAN;
        if probe.conditional.is_some() {
            probe.lags.len()
        } else {
            0
        }
    ];
    let (mut above_sum, mut above_n) = (0.0, 0usize);
    let mut run = MultiLevelRun::new(cfg, seed, replica)?;
    let mut observe = |level: usize, t: usize, x: f64, kind: MoveKind| {
        counts[level][kind as usize] += 1;
        if level == probe.level + 1 && probe.conditional.is_some() {
            above_sum += f(x);
            above_n += 1;
        }
        if level != probe.level {
            return;
        }
        let v = f(x);
        if t > probe.t_b {
            running += v;
            for (k, &h) in probe.horizons.iter().enumerate() {
                if t == probe.t_b + h {
                    pi_hat[k] = running / h as f64;
                }
            }
        }
        let Some(anchor) = probe.anchor else { return };
        if t == anchor {
            anchor_value = v;
        }
        for (k, &s) in probe.lags.iter().enumerate() {
            if t == anchor + s {
                pairs[k] = (anchor_value, v);
                if let Some((p, mean)) = probe.conditional {
                    // Level 0 is observed before level 1 within a tick, so the
                    // sum covers level-1 states 0..t−1.
                    conditional[k] = (1.0 - p) * mean + p * above_sum / above_n as f64;
                }
            }
        }
    };
    run.run(&mut observe)?;
    let rings = match run.config().family.len() > probe.level + 1 {
        true => ring_occupancy(cfg, run.history(probe.level + 1))?,
        false => Vec::new(),
    };
    Ok(ReplicaSummary {
        replica,
        pi_hat,
        pairs,
        conditional,
        rings,
        tallies: MoveTallies::from_counts(&counts),
    })
}

fn ring_occupancy(cfg: &RunConfig, history: &[f64]) -> Result<Vec<usize>> {
    Ok(match &cfg.rings {
        EnergyRingSpec::Full => vec![history.len()],
        EnergyRingSpec::Band { .. } => Vec::new(),
        spec @ EnergyRingSpec::Ladder { .. } => {
            let mut counts = vec![0; spec.ladder_len().expect("ladder")];
            for &x in history {
                if let Some(k) = spec.ladder_index(cfg.family.energy(x))? {
                    counts[k] += 1;
                }
            }
            counts
        }
    })
}

/// Config digest and seed stamped on every result row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunTag {
    pub digest: String,
    pub seed: u64,
}

impl RunTag {
    fn row(&self, estimate: f64, se: f64, replicas: usize) -> ResultRow {
        ResultRow {
            estimate,
            se,
            replicas,
            digest: self.digest.clone(),
            seed: self.seed,
        }
    }
}

/// Across-replica mean of per-replica values, with SE `sd/√R`.
pub fn estimate_mean(values: &[f64], tag: &RunTag) -> Result<ResultRow> {
    let (m, se) = mean_se(values)?;
    Ok(tag.row(m, se, values.len()))
}

/// Across-replica sample variance with its jackknife SE; needs `R ≥ 100`.
pub fn estimate_variance(values: &[f64], tag: &RunTag) -> Result<ResultRow> {
    if values.len() < 100 {
        return Err(Error::TooFewSamples(format!(
            "{} replicas, need 100 for a variance",
            values.len()
        )));
    }
    let (v, se) = variance_jackknife(values)?;
    Ok(tag.row(v, se, values.len()))
}

/// `E[(f(X_T) − m)(f(X_{T+S}) − m)]` per lag from the recorded pairs.
pub fn estimate_autocov(
    summaries: &[ReplicaSummary],
    center: f64,
    tag: &RunTag,
) -> Result<Vec<ResultRow>> {
    let lags = summaries.first().map_or(0, |s| s.pairs.len());
    (0..lags)
        .map(|k| {
            let products: Vec<f64> = summaries
                .iter()
                .map(|s| (s.pairs[k].0 - center) * (s.pairs[k].1 - center))
                .collect();
            estimate_mean(&products, tag)
        })
        .collect()
}
