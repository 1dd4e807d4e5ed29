//! Independent oracles and random instances shared by the integration tests
//! and the acceptance harness.

#![allow(dead_code)]

use eelab::geometry::{
    circle_distance, levy_prokhorov, modified_lp, w1, Domain, EmpiricalMeasure, IntervalUnion,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn points(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random::<f64>()).collect()
}

/// Heap's algorithm over index permutations.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, a, out);
            let j = if k.is_multiple_of(2) { i } else { 0 };
            a.swap(j, k - 1);
        }
    }
    let mut out = Vec::new();
    heap(n, &mut (0..n).collect(), &mut out);
    out
}

/// `min_σ (1/n) Σ d(x_i, y_σ(i))` by enumeration.
pub fn brute_force_w1(xs: &[f64], ys: &[f64], dist: impl Fn(f64, f64) -> f64) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    permutations(xs.len())
        .iter()
        .map(|s| {
            s.iter()
                .enumerate()
                .map(|(i, &j)| dist(xs[i], ys[j]))
                .sum::<f64>()
                / n
        })
        .fold(f64::INFINITY, f64::min)
}

pub fn interval_distance(x: f64, y: f64) -> f64 {
    (x - y).abs()
}

pub fn circle_metric(x: f64, y: f64) -> f64 {
    circle_distance(x, y)
}

/// Largest discrepancy of `w1` against enumeration over `instances` random
/// equal-weight pairs of size at most 6, on both domains.
pub fn w1_oracle_discrepancy(instances: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = 0.0f64;
    for k in 0..instances {
        let n = 1 + k % 6;
        let (xs, ys) = (points(&mut rng, n), points(&mut rng, n));
        for (domain, dist) in [
            (
                Domain::UNIT_INTERVAL,
                interval_distance as fn(f64, f64) -> f64,
            ),
            (Domain::Circle, circle_metric),
        ] {
            let mu = EmpiricalMeasure::uniform(domain, &xs).unwrap();
            let nu = EmpiricalMeasure::uniform(domain, &ys).unwrap();
            let exact = w1(&mu, &nu).unwrap();
            worst = worst.max((exact - brute_force_w1(&xs, &ys, dist)).abs());
        }
    }
    worst
}

/// Smallest slack `2·d_LP − w1` over random interval pairs of mixed sizes.
pub fn lp_bound_slack(pairs: usize, seed: u64) -> f64 {
    let mut rng = rng(seed);
    let mut worst = f64::INFINITY;
    for _ in 0..pairs {
        let (n, m) = (rng.random_range(1..=20), rng.random_range(1..=20));
        let mu = EmpiricalMeasure::uniform(Domain::UNIT_INTERVAL, &points(&mut rng, n)).unwrap();
        let nu = EmpiricalMeasure::uniform(Domain::UNIT_INTERVAL, &points(&mut rng, m)).unwrap();
        let gap = 2.0 * levy_prokhorov(&mu, &nu).unwrap() - w1(&mu, &nu).unwrap();
        worst = worst.min(gap);
    }
    worst
}

pub fn random_set(rng: &mut impl Rng, domain: Domain) -> IntervalUnion {
    let k = rng.random_range(1..=3);
    let raw: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let lo = rng.random::<f64>();
            (lo, lo + rng.random::<f64>() * 0.4)
        })
        .collect();
    IntervalUnion::new(domain, raw).unwrap()
}

/// Smallest slacks of the nested-set bounds: `m/(m+n) − d̃_LP(F, G)` and
/// `(m/(m+n))·diam − w1(F, G)`, where `G` adds `m` points to the `n` of `F`.
pub fn nested_set_slack(instances: usize, seed: u64) -> (f64, f64) {
    let mut rng = rng(seed);
    let (mut lp, mut w) = (f64::INFINITY, f64::INFINITY);
    for k in 0..instances {
        let domain = if k % 2 == 0 {
            Domain::UNIT_INTERVAL
        } else {
            Domain::Circle
        };
        let (n, m) = (rng.random_range(1..=30), rng.random_range(0..=30));
        let small = points(&mut rng, n);
        let mut big = small.clone();
        big.extend(points(&mut rng, m));
        let f = EmpiricalMeasure::uniform(domain, &small).unwrap();
        let g = EmpiricalMeasure::uniform(domain, &big).unwrap();
        let share = m as f64 / (m + n) as f64;
        if !domain.is_circle() {
            let set = random_set(&mut rng, domain);
            lp = lp.min(share - modified_lp(&f, &g, &set).unwrap());
        }
        w = w.min(share * domain.diameter() - w1(&f, &g).unwrap());
    }
    (lp, w)
}

pub mod runs {
    use eelab::diagnostics::DiscretizedChain;
    use eelab::experiments::preset;
    use eelab::geometry::{w1, Domain, EmpiricalMeasure};
    use eelab::samplers::{
        run_multilevel, InitialLaw, LevelSchedule, MoveKind, MultiLevelRun, Proposal, RunConfig,
        SamplerKind,
    };
    use eelab::targets::{EnergyRingSpec, Potential, TemperedFamily};

    /// Two-level square-tooth run on the circle with both levels started at time 0.
    pub fn square_tooth(kind: SamplerKind, p_ee: f64, t_end: usize) -> RunConfig {
        let family = TemperedFamily::with_betas(
            Domain::Circle,
            Potential::square_tooth(8, 4.0).unwrap(),
            &[1.0, 0.25],
        )
        .unwrap();
        let level = |x| LevelSchedule {
            burn_in: 0,
            init: InitialLaw::Point(x),
        };
        RunConfig {
            kind,
            family,
            rings: EnergyRingSpec::ladder([0.0, 4.0]).unwrap(),
            proposal: Proposal::Ball { radius: 1.0 / 64.0 },
            p_ee,
            levels: vec![level(0.01), level(0.3)],
            t_end,
        }
    }

    /// Whether EE at `p_ee = 0` equals MH and PT at `p_ee = 0` equals
    /// two independent MH chains, over `seeds` seeds.
    pub fn zero_p_ee_reductions(seeds: u64, t_end: usize) -> bool {
        (0..seeds).all(|seed| {
            let mh = run_multilevel(&square_tooth(SamplerKind::Mh, 0.0, t_end), seed, 0).unwrap();
            let ee = run_multilevel(&square_tooth(SamplerKind::EquiEnergy, 0.0, t_end), seed, 0)
                .unwrap();
            let pt = run_multilevel(
                &square_tooth(SamplerKind::ParallelTempering, 0.0, t_end),
                seed,
                0,
            )
            .unwrap();
            let only_mh = |t: &eelab::samplers::Trace| {
                t.levels.iter().all(|l| {
                    l.kinds[1..]
                        .iter()
                        .all(|k| matches!(k, MoveKind::MhAccept | MoveKind::MhReject))
                })
            };
            mh == ee && mh == pt && only_mh(&mh)
        })
    }

    /// Largest entrywise `|π_i P − (π_i P)ᵀ|` over both levels of the
    /// square-tooth family and the flat circle, on `n` cells.
    pub fn detailed_balance_defect(n: usize) -> f64 {
        let fam = square_tooth(SamplerKind::Mh, 0.0, 1).family;
        let flat = TemperedFamily::with_betas(Domain::Circle, Potential::Flat, &[1.0]).unwrap();
        let densities = [
            fam.density(0).unwrap(),
            fam.density(1).unwrap(),
            flat.density(0).unwrap(),
        ];
        densities
            .into_iter()
            .map(|d| {
                DiscretizedChain::mh(d, 1.0 / 64.0, n)
                    .unwrap()
                    .detailed_balance_defect()
            })
            .fold(0.0, f64::max)
    }

    /// `w1` between `steps` level-0 states of the limiting sampler on the
    /// square-tooth preset (after `burn_in`) and the exact level-0 target.
    pub fn limiting_stationarity(burn_in: usize, steps: usize, seed: u64) -> f64 {
        let mut run = preset("square-tooth").unwrap().run_config(0).unwrap();
        run.kind = SamplerKind::Limiting;
        run.levels[0].burn_in = 0;
        run.levels[0].init = InitialLaw::Uniform;
        run.levels[1].burn_in = 0;
        run.t_end = burn_in + steps - 1;
        let mut states = Vec::with_capacity(steps);
        let mut engine = MultiLevelRun::new(&run, seed, 0).unwrap();
        engine
            .run(&mut |level: usize, t: usize, x: f64, _: MoveKind| {
                if level == 0 && t >= burn_in {
                    states.push(x);
                }
            })
            .unwrap();
        let empirical = EmpiricalMeasure::uniform(Domain::Circle, &states).unwrap();
        let exact = run.family.density(0).unwrap().to_law(1e-4).unwrap();
        w1(&empirical, &exact).unwrap()
    }
}
