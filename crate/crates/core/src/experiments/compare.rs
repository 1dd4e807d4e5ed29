//! `compare-autocov`: decorrelation of equi-energy, parallel tempering and
//! plain Metropolis on the square-tooth target.

use super::replicas::fold_replicas;
use super::report::{Report, Table};
use super::stats::{first_below, LagProducts};
use super::{required, Command, Ctx};
use crate::diagnostics::{ee_autocov_bound, pt_autocov_lower};
use crate::error::{Error, Result};
use crate::geometry::Observable;
use crate::row;
use crate::samplers::{InitialLaw, MoveKind, MultiLevelRun, Proposal, RunConfig, SamplerKind};
use crate::targets::{Potential, TemperedFamily};

/// Cell width when integrating `f` against non-flat densities.
const MEAN_CELL: f64 = 1e-4;

/// Normalized autocovariance of one sampler over the window.
struct Curve {
    kind: SamplerKind,
    rho: Vec<f64>,
    used: usize,
}

pub(super) fn run(ctx: &Ctx) -> Result<Report> {
    let cfg = ctx.cfg;
    let ex = &cfg.experiment;
    let base = cfg.run_config(0)?;
    let Potential::SquareTooth { wells, depth } = base.family.potential() else {
        return Err(Error::config("compare-autocov needs a square-tooth target"));
    };
    let Proposal::Ball { radius: c } = base.proposal else {
        return Err(Error::config(
            "compare-autocov needs a ball proposal (sampler.c)",
        ));
    };
    if base.family.len() != 2 || !base.family.domain().is_circle() {
        return Err(Error::config(
            "compare-autocov needs two levels on the circle",
        ));
    }
    if !(base.p_ee > 0.0 && base.p_ee < 1.0) {
        return Err(Error::config(format!(
            "p_ee must lie in (0, 1), got {}",
            base.p_ee
        )));
    }
    if wells % 2 != 0 {
        return Err(Error::config(format!(
            "the well count must be even, got {wells}"
        )));
    }
    let t_b = required(&ex.t_b, "Tb")?;
    let window = required(&ex.window, "window")?;
    if window < 2 {
        return Err(Error::config("the window needs at least two points"));
    }
    let threshold = ex.threshold.unwrap_or(0.2);
    let replicas = cfg.replicas(200);
    let kinds = ex.samplers.clone().unwrap_or(vec![
        SamplerKind::EquiEnergy,
        SamplerKind::ParallelTempering,
        SamplerKind::Mh,
    ]);
    let condition_pt = ex.condition_pt.unwrap_or(false);
    let min_conditioned = ex.min_conditioned.unwrap_or(20);
    let eps = (1.0f64 / 512.0).min(c * wells as f64 / 384.0) / 2.0;
    // Hypotheses of the two bounds, checked before any run.
    ee_autocov_bound(wells, c, base.p_ee, eps, depth, 1)?;
    pt_autocov_lower(wells, c, 1)?;

    let f = cfg.observable();
    if f != Observable::Centered {
        f.certify(base.family.domain())?;
    }
    let domain = base.family.domain();
    let law = base.family.density(0)?.to_law(MEAN_CELL)?;
    let center = law.expect(|x| f.eval(domain, x), &f.breakpoints(domain));
    let core = (1.0 / (8.0 * wells as f64), 3.0 / (8.0 * wells as f64));
    let plan = LagProducts::new(window);
    let batch = (2 * ctx.pool.current_num_threads()).max(4);

    let mut curves = Vec::new();
    let mut report = ctx.report(Command::CompareAutocov);
    for &kind in &kinds {
        let run = schedule(&base, kind, t_b, window)?;
        let conditioned = condition_pt && kind == SamplerKind::ParallelTempering;
        let (sums, used) = fold_replicas(
            &ctx.pool,
            replicas,
            batch,
            |r| {
                let mut series = Vec::with_capacity(window);
                let mut at_start = [f64::NAN; 2];
                let mut engine = MultiLevelRun::new(&run, ctx.tag.seed, r)?;
                engine.run(&mut |level: usize, t: usize, x: f64, _: MoveKind| {
                    if t == t_b && level < 2 {
                        at_start[level] = x;
                    }
                    if level == 0 && t >= t_b && t < t_b + window {
                        series.push(f.eval(domain, x) - center);
                    }
                })?;
                let in_core = at_start.iter().all(|&x| x >= core.0 && x <= core.1);
                Ok((!conditioned || in_core).then(|| plan.sums(&series)))
            },
            (vec![0.0; window], 0usize),
            |(acc, used), _, sums| {
                if let Some(s) = sums {
                    acc.iter_mut().zip(&s).for_each(|(a, b)| *a += b);
                    *used += 1;
                }
            },
        )?;
        if conditioned {
            report.set("pt_conditioned", used);
            if used < min_conditioned {
                return Err(Error::TooFewSamples(format!(
                    "{used} of {replicas} parallel-tempering replicas start in the core, need {min_conditioned}"
                )));
            }
        }
        let gamma: Vec<f64> = sums
            .iter()
            .enumerate()
            .map(|(k, s)| s / (used * (window - k)) as f64)
            .collect();
        let rho = gamma.iter().map(|g| g / gamma[0]).collect();
        curves.push(Curve { kind, rho, used });
    }

    let mut lags_table = Table::new(
        "lags",
        &["sampler", "threshold", "first_lag", "censored", "replicas"],
    );
    let mut first = Vec::new();
    for c in &curves {
        let hit = first_below(&c.rho, threshold);
        let lag = hit.unwrap_or(window);
        lags_table.push(row![c.kind, threshold, lag, hit.is_none(), c.used]);
        report.set(&format!("lag_{}", c.kind), lag);
        first.push((c.kind, lag, hit.is_none()));
    }
    let find = |k: SamplerKind| first.iter().find(|e| e.0 == k).map(|e| (e.1, e.2));
    let (ee, pt, mh) = (
        find(SamplerKind::EquiEnergy),
        find(SamplerKind::ParallelTempering),
        find(SamplerKind::Mh),
    );
    // A censored lag is only known to be at least the window, so it may
    // stand on the large side of an inequality but never on the small side.
    if depth > 0.0 {
        if let (Some(e), Some(p)) = (ee, pt) {
            report.check(
                "ee vs pt",
                !e.1 && 4 * e.0 <= p.0,
                format!("lag(ee) = {} vs lag(pt)/4 = {}", e.0, p.0 as f64 / 4.0),
            );
        }
        if let (Some(p), Some(m)) = (pt, mh) {
            report.check(
                "pt vs mh",
                !p.1 && 2 * p.0 <= m.0,
                format!(
                    "lag(pt)/4 = {} vs lag(mh)/8 = {}{}",
                    p.0 as f64 / 4.0,
                    m.0 as f64 / 8.0,
                    if m.1 { "+" } else { "" }
                ),
            );
        }
    } else if let (Some(p), Some(m)) = (pt, mh) {
        let (lo, hi) = (p.0.min(m.0), p.0.max(m.0));
        report.check(
            "pt vs mh at H = 0",
            !p.1 && !m.1 && hi <= 2 * lo,
            format!("lag(pt) = {} vs lag(mh) = {}", p.0, m.0),
        );
    }

    let mut header = vec!["lag".to_owned()];
    header.extend(curves.iter().map(|c| c.kind.label().to_owned()));
    header.extend(["ee_bound".to_owned(), "pt_lower".to_owned()]);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut table = Table::new("autocov", &header);
    for lag in log_lags(window) {
        let mut cells = vec![lag.to_string()];
        cells.extend(curves.iter().map(|c| c.rho[lag].to_string()));
        let bound = ee_autocov_bound(wells, c, base.p_ee, eps, depth, lag as u64).map(|b| b.bound);
        cells.push(bound.map(|b| b.to_string()).unwrap_or_default());
        cells.push(
            pt_autocov_lower(wells, c, lag as u64)
                .map(|b| b.to_string())
                .unwrap_or_default(),
        );
        table.push(cells);
    }
    report.set("center", center);
    report.set("eps", eps);
    report.set("window", window);
    report.line = first
        .iter()
        .map(|(k, l, cen)| format!("lag({k}) = {l}{}", if *cen { "+" } else { "" }))
        .collect::<Vec<_>>()
        .join(", ");
    report.tables.push(table);
    report.tables.push(lags_table);
    Ok(report)
}

/// The run for one sampler: equi-energy starts level 0 at `t_b` on the
/// history of the level above; the others run from time 0.
fn schedule(base: &RunConfig, kind: SamplerKind, t_b: usize, window: usize) -> Result<RunConfig> {
    let mut run = base.clone();
    run.kind = kind;
    run.t_end = t_b + window - 1;
    match kind {
        SamplerKind::EquiEnergy | SamplerKind::Limiting => {
            run.levels[0].burn_in = t_b;
            run.levels[1].burn_in = 0;
        }
        SamplerKind::ParallelTempering => {
            for l in &mut run.levels {
                l.burn_in = 0;
                l.init = InitialLaw::Uniform;
            }
        }
        SamplerKind::Mh => {
            let fam = &base.family;
            run.family =
                TemperedFamily::new(fam.domain(), fam.potential(), fam.levels()[..1].to_vec())?;
            run.levels = vec![base.levels[0]];
            run.levels[0].burn_in = 0;
            run.levels[0].init = InitialLaw::Uniform;
        }
    }
    run.validate()?;
    Ok(run)
}

/// `0` and `⌊2^{j/8}⌋` below `window`, without repeats.
fn log_lags(window: usize) -> Vec<usize> {
    let mut lags: Vec<usize> = std::iter::once(0)
        .chain(
            (0..)
                .map(|j| 2f64.powf(j as f64 / 8.0) as usize)
                .take_while(|&l| l < window),
        )
        .collect();
    lags.dedup();
    lags
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_lags_are_increasing() {
        let l = log_lags(1000);
        assert_eq!(&l[..3], &[0, 1, 2]);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        assert!(*l.last().unwrap() < 1000);
    }

    #[test]
    fn mh_schedule_has_one_level() {
        let cfg = crate::experiments::preset("square-tooth").unwrap();
        let base = cfg.run_config(0).unwrap();
        let run = schedule(&base, SamplerKind::Mh, 10, 100).unwrap();
        assert_eq!(run.family.len(), 1);
        assert_eq!(run.t_end, 109);
        let ee = schedule(&base, SamplerKind::EquiEnergy, 10, 100).unwrap();
        assert_eq!(ee.levels[0].burn_in, 10);
        assert_eq!(ee.levels[0].init, InitialLaw::EeMixture);
    }
}
