use super::config::{InitialLaw, RunConfig, SamplerKind};
use super::moves::{mh_step, pt_swap_probability, MoveKind};
use super::ring_index::{AuditState, RingIndex};
use crate::error::{Error, Result};
use crate::geometry::EmpiricalMeasure;
use crate::rng::{Lane, RngStream, StepVariates, StreamId};
use crate::targets::{EnergyRingSpec, Restriction};

/// Ticks between ring-consistency audits in debug builds.
const AUDIT_EVERY: usize = 10_000;

/// Receives every state of every level as it is produced.
pub trait Observer {
    fn observe(&mut self, level: usize, t: usize, x: f64, kind: MoveKind);
}

impl<F: FnMut(usize, usize, f64, MoveKind)> Observer for F {
    fn observe(&mut self, level: usize, t: usize, x: f64, kind: MoveKind) {
        self(level, t, x, kind)
    }
}

/// States of one level at `start, start + 1, …`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LevelTrace {
    pub start: usize,
    pub points: Vec<f64>,
    pub kinds: Vec<MoveKind>,
}

impl LevelTrace {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// State at absolute time `t`.
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(self.start)
            .and_then(|k| self.points.get(k).copied())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub replica: u64,
    pub levels: Vec<LevelTrace>,
}

impl Trace {
    pub fn new(replica: u64, levels: usize) -> Self {
        Trace {
            replica,
            levels: vec![LevelTrace::default(); levels],
        }
    }

    /// `(level, t, x, kind)` rows, level-major.
    pub fn rows(&self) -> impl Iterator<Item = (usize, usize, f64, MoveKind)> + '_ {
        self.levels.iter().enumerate().flat_map(|(i, l)| {
            l.points
                .iter()
                .zip(&l.kinds)
                .enumerate()
                .map(move |(k, (&x, &kind))| (i, l.start + k, x, kind))
        })
    }
}

impl Observer for Trace {
    fn observe(&mut self, level: usize, t: usize, x: f64, kind: MoveKind) {
        let l = &mut self.levels[level];
        if l.points.is_empty() {
            l.start = t;
        }
        debug_assert_eq!(l.start + l.points.len(), t, "non-contiguous trace");
        l.points.push(x);
        l.kinds.push(kind);
    }
}

#[derive(Debug)]
struct LevelState {
    steps: RngStream,
    init: RngStream,
    x: f64,
    active: bool,
    history: Vec<f64>,
    rings: Option<RingIndex>,
    audit: AuditState,
    /// Exact ring restrictions of the level above, for the limiting sampler.
    restrictions: Vec<Option<Restriction>>,
}

/// A multi-level run advanced one clock tick at a time. At tick `t` the
/// levels whose burn-in ends at `t` are started top-down, then every active
/// level moves once reading only states of the level above at times `≤ t`.
#[derive(Debug)]
pub struct MultiLevelRun<'a> {
    cfg: &'a RunConfig,
    t: usize,
    levels: Vec<LevelState>,
}

impl<'a> MultiLevelRun<'a> {
    pub fn new(cfg: &'a RunConfig, seed: u64, replica: u64) -> Result<Self> {
        cfg.validate()?;
        let energy_range = cfg.family.potential().range();
        let levels = (0..cfg.levels.len())
            .map(|i| LevelState {
                steps: RngStream::new(seed, StreamId::new(replica, i, Lane::Step)),
                init: RngStream::new(seed, StreamId::new(replica, i, Lane::Init)),
                x: f64::NAN,
                active: false,
                history: Vec::new(),
                rings: (i > 0 && cfg.kind == SamplerKind::EquiEnergy)
                    .then(|| RingIndex::new(&cfg.rings, energy_range)),
                audit: AuditState::default(),
                restrictions: Vec::new(),
            })
            .collect();
        Ok(MultiLevelRun { cfg, t: 0, levels })
    }

    pub fn config(&self) -> &RunConfig {
        self.cfg
    }

    /// Current clock.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn is_finished(&self) -> bool {
        self.t >= self.cfg.t_end && self.levels.iter().all(|l| l.active)
    }

    /// Current state of level `i`, once started.
    pub fn state(&self, i: usize) -> Option<f64> {
        self.levels.get(i).filter(|l| l.active).map(|l| l.x)
    }

    /// States of level `i` from its burn-in to now.
    pub fn history(&self, i: usize) -> &[f64] {
        &self.levels[i].history
    }

    /// Uniform empirical measure on the ring of energy `v` that level `i`
    /// draws from, i.e. the matching history of level `i + 1`.
    pub fn ring_lookup(&self, i: usize, v: f64) -> Result<EmpiricalMeasure> {
        let domain = self.cfg.family.domain();
        let above = self.levels.get(i + 1).ok_or(Error::LevelOutOfRange {
            index: i + 1,
            levels: self.levels.len(),
        })?;
        match &above.rings {
            Some(rings) => rings.lookup(domain, v),
            None => {
                let ring = self.cfg.rings.ring_interval(v)?;
                let family = &self.cfg.family;
                let members: Vec<f64> = above
                    .history
                    .iter()
                    .copied()
                    .filter(|&x| ring.contains(family.energy(x)))
                    .collect();
                if members.is_empty() {
                    Ok(EmpiricalMeasure::empty(domain))
                } else {
                    EmpiricalMeasure::uniform(domain, &members)
                }
            }
        }
    }

    fn log_density(&self, i: usize, x: f64) -> f64 {
        self.cfg
            .family
            .log_density(i, x)
            .expect("validated level index")
    }

    fn start_level(&mut self, i: usize) -> Result<f64> {
        let cfg = self.cfg;
        let (a, b) = cfg.family.domain().bounds();
        let v = self.levels[i].init.step(0);
        let uniform = a + v.proposal * (b - a);
        Ok(match cfg.levels[i].init {
            InitialLaw::Point(x) => cfg.family.domain().normalize(x),
            InitialLaw::Uniform => uniform,
            InitialLaw::Target => cfg.family.density(i)?.sample(v.proposal),
            InitialLaw::EeMixture => {
                let above = &self.levels[i + 1].history;
                if v.kind < cfg.p_ee && !above.is_empty() {
                    let k = ((v.proposal * above.len() as f64) as usize).min(above.len() - 1);
                    above[k]
                } else {
                    uniform
                }
            }
        })
    }

    fn record(&mut self, i: usize, x: f64) -> Result<()> {
        let energy = self.cfg.family.energy(x);
        let l = &mut self.levels[i];
        l.x = x;
        l.history.push(x);
        if let Some(rings) = &mut l.rings {
            rings.push(x, energy)?;
        }
        Ok(())
    }

    fn mh(&self, i: usize, v: &StepVariates) -> (f64, MoveKind) {
        let x = self.levels[i].x;
        mh_step(
            self.cfg.family.domain(),
            x,
            self.cfg.proposal,
            |y| self.log_density(i, y),
            v,
        )
    }

    fn accept_jump(&self, i: usize, q: f64, v: &StepVariates) -> Result<(f64, MoveKind)> {
        let x = self.levels[i].x;
        let r = self.cfg.family.ee_acceptance(i, x, q, &self.cfg.rings)?;
        Ok(if v.accept < r {
            (q, MoveKind::EeAccept)
        } else {
            (x, MoveKind::EeReject)
        })
    }

    fn ee(&self, i: usize, v: &StepVariates) -> Result<(f64, MoveKind)> {
        let x = self.levels[i].x;
        let rings = self.levels[i + 1]
            .rings
            .as_ref()
            .expect("equi-energy levels index their history");
        match rings.pick(self.cfg.family.energy(x), v.proposal)? {
            None => Ok((x, MoveKind::EeSkip)),
            Some(q) => self.accept_jump(i, q, v),
        }
    }

    fn limiting(&mut self, i: usize, v: &StepVariates) -> Result<(f64, MoveKind)> {
        let family = &self.cfg.family;
        let x = self.levels[i].x;
        let energy = family.energy(x);
        let ring = self.cfg.rings.ring_interval(energy)?;
        let slot = match &self.cfg.rings {
            EnergyRingSpec::Ladder { .. } => self.cfg.rings.ladder_index(energy)?,
            EnergyRingSpec::Full => Some(0),
            EnergyRingSpec::Band { .. } => None,
        };
        let q = match slot {
            Some(k) => {
                let cache = &mut self.levels[i].restrictions;
                if cache.len() <= k {
                    cache.resize(k + 1, None);
                }
                if cache[k].is_none() {
                    cache[k] = Some(family.ring_restriction(i + 1, ring)?);
                }
                cache[k].as_ref().expect("filled").sample(v.proposal)
            }
            None => family.ring_restriction(i + 1, ring)?.sample(v.proposal),
        };
        self.accept_jump(i, q, v)
    }

    fn move_level(&mut self, i: usize, t: u64) -> Result<(f64, MoveKind)> {
        let v = self.levels[i].steps.step(t);
        let top = i + 1 == self.levels.len();
        let jump = !top && v.kind < self.cfg.p_ee;
        match self.cfg.kind {
            SamplerKind::EquiEnergy if jump => self.ee(i, &v),
            SamplerKind::Limiting if jump => self.limiting(i, &v),
            _ => Ok(self.mh(i, &v)),
        }
    }

    fn move_pair(&mut self, t: u64) -> [(f64, MoveKind); 2] {
        let v0 = self.levels[0].steps.step(t);
        let v1 = self.levels[1].steps.step(t);
        let (x0, x1) = (self.levels[0].x, self.levels[1].x);
        if v0.kind < self.cfg.p_ee {
            let p = pt_swap_probability(
                x0,
                x1,
                |y| self.log_density(0, y),
                |y| self.log_density(1, y),
            );
            if v0.accept < p {
                [(x1, MoveKind::Swap), (x0, MoveKind::Swap)]
            } else {
                [(x0, MoveKind::Hold), (x1, MoveKind::Hold)]
            }
        } else {
            [self.mh(0, &v0), self.mh(1, &v1)]
        }
    }

    /// Advance one tick; returns `false` once the run is complete.
    pub fn tick(&mut self, obs: &mut impl Observer) -> Result<bool> {
        let t = self.t;
        for i in (0..self.levels.len()).rev() {
            if !self.levels[i].active && self.cfg.levels[i].burn_in == t {
                let x = self.start_level(i)?;
                self.levels[i].active = true;
                self.record(i, x)?;
                obs.observe(i, t, x, MoveKind::Init);
            }
        }
        if t >= self.cfg.t_end {
            return Ok(false);
        }
        let moves: Vec<(usize, (f64, MoveKind))> =
            if self.cfg.kind == SamplerKind::ParallelTempering {
                if self.levels[0].active {
                    self.move_pair(t as u64).into_iter().enumerate().collect()
                } else {
                    vec![]
                }
            } else {
                let mut out = Vec::with_capacity(self.levels.len());
                for i in 0..self.levels.len() {
                    if self.levels[i].active {
                        out.push((i, self.move_level(i, t as u64)?));
                    }
                }
                out
            };
        for (i, (x, kind)) in moves {
            self.record(i, x)?;
            obs.observe(i, t + 1, x, kind);
        }
        self.t = t + 1;
        if cfg!(debug_assertions) && self.t.is_multiple_of(AUDIT_EVERY) {
            self.audit()?;
        }
        Ok(true)
    }

    /// Check every ring index against its raw history.
    pub fn audit(&mut self) -> Result<()> {
        let family = &self.cfg.family;
        for l in &mut self.levels {
            if let Some(rings) = &l.rings {
                rings.audit(&l.history, |x| family.energy(x), &mut l.audit)?;
            }
        }
        Ok(())
    }

    /// Run to `t_end`.
    pub fn run(&mut self, obs: &mut impl Observer) -> Result<()> {
        while self.tick(obs)? {}
        Ok(())
    }
}

/// Full trace of one replica.
pub fn run_multilevel(cfg: &RunConfig, seed: u64, replica: u64) -> Result<Trace> {
    let mut trace = Trace::new(replica, cfg.levels.len());
    MultiLevelRun::new(cfg, seed, replica)?.run(&mut trace)?;
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::samplers::{LevelSchedule, Proposal};
    use crate::targets::{Potential, TemperedFamily};

    fn circle(kind: SamplerKind, p_ee: f64, h: f64, t_end: usize) -> RunConfig {
        RunConfig {
            kind,
            family: TemperedFamily::with_betas(
                Domain::Circle,
                Potential::square_tooth(4, h).unwrap(),
                &[1.0, 0.0],
            )
            .unwrap(),
            rings: EnergyRingSpec::ladder([0.0, h]).unwrap(),
            proposal: Proposal::Ball { radius: 0.05 },
            p_ee,
            levels: vec![
                LevelSchedule {
                    burn_in: 50,
                    init: InitialLaw::Point(0.05),
                },
                LevelSchedule {
                    burn_in: 0,
                    init: InitialLaw::Uniform,
                },
            ],
            t_end,
        }
    }

    #[test]
    fn trace_is_contiguous_and_consistent() {
        let cfg = circle(SamplerKind::EquiEnergy, 0.3, 3.0, 2000);
        let trace = run_multilevel(&cfg, 7, 0).unwrap();
        assert_eq!(trace.levels[0].start, 50);
        assert_eq!(trace.levels[0].len(), 2000 - 50 + 1);
        assert_eq!(trace.levels[1].len(), 2001);
        for l in &trace.levels {
            assert_eq!(l.kinds[0], MoveKind::Init);
            for k in 1..l.len() {
                if !l.kinds[k].moves_state() {
                    assert_eq!(l.points[k], l.points[k - 1]);
                }
            }
        }
        assert!(trace.levels[0].kinds.contains(&MoveKind::EeAccept));
    }

    #[test]
    fn deterministic() {
        let cfg = circle(SamplerKind::EquiEnergy, 0.3, 3.0, 500);
        assert_eq!(
            run_multilevel(&cfg, 11, 2).unwrap(),
            run_multilevel(&cfg, 11, 2).unwrap()
        );
        assert_ne!(
            run_multilevel(&cfg, 11, 2).unwrap(),
            run_multilevel(&cfg, 11, 3).unwrap()
        );
    }

    #[test]
    fn zero_p_ee_reduces_to_metropolis() {
        let mh = run_multilevel(&circle(SamplerKind::Mh, 0.0, 3.0, 800), 5, 1).unwrap();
        let ee = run_multilevel(&circle(SamplerKind::EquiEnergy, 0.0, 3.0, 800), 5, 1).unwrap();
        assert_eq!(mh, ee);
        let mut pt_cfg = circle(SamplerKind::ParallelTempering, 0.0, 3.0, 800);
        let mut mh_cfg = circle(SamplerKind::Mh, 0.0, 3.0, 800);
        for cfg in [&mut pt_cfg, &mut mh_cfg] {
            cfg.levels[1].burn_in = 50;
        }
        assert_eq!(
            run_multilevel(&pt_cfg, 5, 1).unwrap(),
            run_multilevel(&mh_cfg, 5, 1).unwrap()
        );
    }

    #[test]
    fn ring_lookup_filters_history() {
        let cfg = circle(SamplerKind::EquiEnergy, 0.3, 3.0, 300);
        let mut run = MultiLevelRun::new(&cfg, 3, 0).unwrap();
        let mut sink = |_: usize, _: usize, _: f64, _: MoveKind| {};
        assert!(run.ring_lookup(0, 0.0).unwrap().is_empty());
        run.run(&mut sink).unwrap();
        let deep = run.ring_lookup(0, 0.0).unwrap();
        assert!(!deep.is_empty());
        assert!(deep.points().iter().all(|&x| cfg.family.energy(x) == 0.0));
        let total = deep.len() + run.ring_lookup(0, 3.0).unwrap().len();
        let distinct = {
            let mut h = run.history(1).to_vec();
            h.sort_by(f64::total_cmp);
            h.dedup();
            h.len()
        };
        assert_eq!(total, distinct);
        run.audit().unwrap();
        assert!(run.ring_lookup(1, 0.0).is_err());
    }

    #[test]
    fn swap_moves_exchange_states() {
        let cfg = circle(SamplerKind::ParallelTempering, 0.5, 2.0, 400);
        let mut cfg = cfg;
        cfg.levels[1].burn_in = 50;
        let trace = run_multilevel(&cfg, 9, 0).unwrap();
        let (a, b) = (&trace.levels[0], &trace.levels[1]);
        let mut swaps = 0;
        for k in 1..a.len() {
            if a.kinds[k] == MoveKind::Swap {
                swaps += 1;
                assert_eq!(
                    (a.points[k], b.points[k]),
                    (b.points[k - 1], a.points[k - 1])
                );
            }
        }
        assert!(swaps > 0);
    }
}
