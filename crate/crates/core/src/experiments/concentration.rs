//! `concentration`: empirical tails of `π̂_{T,T_b}` against the
//! concentration bound for a perturbed positively curved kernel.

use super::replicas::map_replicas;
use super::report::{Report, Table};
use super::stats::clopper_pearson;
use super::{required, Command, Ctx, TestKernelKind};
use crate::diagnostics::{
    concentration_bound_thm31, granularity, joulin_ollivier_v2, uniform_grid, ConcentrationParams,
    Kernel, Lambda, LazyUniformKernel,
};
use crate::error::{Error, Result};
use crate::rng::{Lane, RngStream, StreamId};
use crate::row;

/// Confidence of the binomial interval on each tail frequency.
const CONFIDENCE: f64 = 0.99;

pub(super) fn run(ctx: &Ctx) -> Result<Report> {
    let cfg = ctx.cfg;
    let ex = &cfg.experiment;
    let spec = cfg.kernel()?;
    let TestKernelKind::LazyUniform = spec.kind;
    let domain = cfg.domain()?;
    let kernel = LazyUniformKernel::new(domain, spec.c, spec.p)?;
    if !(spec.p > 0.0) {
        return Err(Error::config(
            "the lazy-uniform weight must be positive for positive curvature",
        ));
    }
    let f = cfg.observable();
    f.certify(domain)?;
    let &[t] = ex.t.as_slice() else {
        return Err(Error::config(
            "concentration takes exactly one run length T",
        ));
    };
    let t_b = required(&ex.t_b, "Tb")?;
    let replicas = cfg.replicas(10_000);
    let fracs = ex.deltas.clone().unwrap_or(vec![0.0]);
    let r_points = ex.r_points.unwrap_or(10);
    let x0 = ex.x0.unwrap_or_else(|| {
        let (a, b) = domain.bounds();
        (a + b) / 2.0
    });
    if t == 0 || r_points == 0 || !domain.contains(x0) {
        return Err(Error::config(
            "need T ≥ 1, at least one r value and x0 inside the domain",
        ));
    }

    // κ ≥ p, the variance envelope is constant (C_v = 0), and n(x) = 1.
    let (c, p, len) = (spec.c, spec.p, domain.length());
    let kappa = p;
    let envelope =
        ((1.0 - p) * c * c / 3.0 + p * len * len / 12.0 + p * (1.0 - p) * (len / 2.0).powi(2))
            / kappa;
    let sigma_inf = granularity(&kernel, &uniform_grid(domain, 64))?;
    let base = ConcentrationParams {
        kappa,
        c_v: 0.0,
        sigma_inf,
        t: t as f64,
        t_b: t_b as f64,
        delta: 0.0,
    };
    let delta_max = base.delta_max();
    let jo = joulin_ollivier_v2(&base, envelope)?;
    if !jo.r_max.is_finite() {
        return Err(Error::config("zero granularity leaves r unbounded"));
    }
    for &frac in &fracs {
        if !(0.0..1.0).contains(&frac) {
            return Err(Error::config(format!(
                "perturbation fraction {frac} outside [0, 1): need δ < δ_max"
            )));
        }
    }
    let radii: Vec<f64> = (1..=r_points)
        .map(|k| jo.r_max * k as f64 / (r_points + 1) as f64)
        .collect();

    let mut report = ctx.report(Command::Concentration);
    let mut table = Table::new(
        "coverage",
        &[
            "delta", "r", "exceed", "replicas", "p_hat", "ci_upper", "bound",
        ],
    );
    for (di, &frac) in fracs.iter().enumerate() {
        let delta = frac * delta_max;
        let k = kernel.with_shift(delta);
        let params = ConcentrationParams { delta, ..base };
        let estimates = map_replicas(&ctx.pool, replicas, |r| {
            let mut rng = RngStream::new(ctx.tag.seed, StreamId::new(r, di, Lane::Step));
            let mut x = x0;
            for _ in 0..t_b {
                x = k.sample(x, &mut rng);
            }
            let mut sum = 0.0;
            for _ in 0..t {
                x = k.sample(x, &mut rng);
                sum += f.eval(domain, x);
            }
            Ok(sum / t as f64)
        })?;
        // E π̂ is estimated by the replica mean.
        let mean = estimates.iter().sum::<f64>() / replicas as f64;
        let mut worst = f64::NEG_INFINITY;
        for &r in &radii {
            let exceed = estimates.iter().filter(|&&e| (e - mean).abs() >= r).count() as u64;
            let (_, upper) = clopper_pearson(exceed, replicas as u64, CONFIDENCE)?;
            let bound = concentration_bound_thm31(&params, r, Lambda::Auto, t as f64 * envelope)?;
            worst = worst.max(upper - bound);
            table.push(row![
                delta,
                r,
                exceed,
                replicas,
                exceed as f64 / replicas as f64,
                upper,
                bound
            ]);
        }
        report.check(
            format!("coverage delta={delta:.3e}"),
            worst <= 0.0,
            format!("largest CI upper minus bound {worst:.3e}"),
        );
    }
    report.set("kappa", kappa);
    report.set("envelope", envelope);
    report.set("sigma_inf", sigma_inf);
    report.set("delta_max", delta_max);
    report.set("v2", jo.v2);
    report.set("r_max", jo.r_max);
    report.line = format!(
        "{} radii × {} perturbations, R = {replicas}",
        radii.len(),
        fracs.len()
    );
    report.tables.push(table);
    Ok(report)
}
