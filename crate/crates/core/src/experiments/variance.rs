//! `verify-variance`: the variance of `π̂_{T,T_b}` in the uniform example.

use super::replicas::{estimate_mean, estimate_variance, map_replicas, summarize, Probe};
use super::report::{Report, Table};
use super::stats::linear_fit;
use super::{required, Command, Ctx, UniformSetup};
use crate::error::{Error, Result};
use crate::row;

pub(super) fn run(ctx: &Ctx) -> Result<Report> {
    let cfg = ctx.cfg;
    let setup = UniformSetup::new(cfg)?;
    let ex = &cfg.experiment;
    let t_b = required(&ex.t_b, "Tb")?;
    let horizons = ex.t.clone();
    if horizons.is_empty() || horizons.contains(&0) {
        return Err(Error::config("experiment.T needs positive run lengths"));
    }
    let p_ees = ex.p_ees.clone().unwrap_or_else(|| vec![setup.run.p_ee]);
    let replicas = cfg.replicas(2000);
    let t_max = *horizons.iter().max().expect("nonempty");
    let probe = Probe {
        observable: setup.f.clone(),
        level: 0,
        t_b,
        horizons: horizons.clone(),
        anchor: None,
        lags: Vec::new(),
        conditional: None,
    };

    let mut report = ctx.report(Command::VerifyVariance);
    let mut table = Table::new(
        "variance",
        &[
            "p_ee", "T", "mean", "mean_se", "t_var", "t_var_se", "oracle", "limit", "printed",
            "replicas", "digest", "seed",
        ],
    );
    // T·Var per horizon, one entry per p_ee, for the fit in p².
    let mut by_t: Vec<Vec<(f64, f64)>> = vec![Vec::new(); horizons.len()];
    for &p in &p_ees {
        let mut run = setup.run.clone();
        run.p_ee = p;
        run.levels[0].burn_in = t_b;
        run.t_end = t_b + t_max;
        run.validate()?;
        // One seed for every p_ee: the fit in p² sees common random numbers.
        let summaries = map_replicas(&ctx.pool, replicas, |r| {
            summarize(&run, &probe, ctx.tag.seed, r)
        })?;
        let oracle = setup.oracle(p, t_b);
        let mut scaled = Vec::new();
        for (k, &t) in horizons.iter().enumerate() {
            let values: Vec<f64> = summaries.iter().map(|s| s.pi_hat[k]).collect();
            let mean = estimate_mean(&values, &ctx.tag)?;
            let var = estimate_variance(&values, &ctx.tag)?;
            let tf = t as f64;
            let (tv, tv_se, exact) = (tf * var.estimate, tf * var.se, tf * oracle.variance(t));
            table.push(row![
                p,
                t,
                mean.estimate,
                mean.se,
                tv,
                tv_se,
                exact,
                oracle.limit_constant(),
                oracle.printed_constant(),
                replicas,
                ctx.tag.digest,
                ctx.tag.seed
            ]);
            report.check(
                format!("mean p_ee={p} T={t}"),
                mean.within(setup.mean, 3.0),
                format!(
                    "{:.3e} vs λ(f) = {}, se {:.1e}",
                    mean.estimate, setup.mean, mean.se
                ),
            );
            report.check(
                format!("oracle p_ee={p} T={t}"),
                (tv - exact).abs() <= 3.0 * tv_se,
                format!("T·Var {tv:.5} vs {exact:.5}, se {tv_se:.1e}"),
            );
            by_t[k].push((p * p, tv));
            scaled.push(tv);
        }
        if horizons.len() > 1 {
            let ratio = scaled[0] / scaled[scaled.len() - 1];
            report.check(
                format!("across T p_ee={p}"),
                (ratio - 1.0).abs() <= 0.1,
                format!(
                    "T·Var ratio {ratio:.4} between T = {} and {}",
                    horizons[0], t_max
                ),
            );
        }
        let factor = oracle.printed_constant() / oracle.limit_constant();
        report.check(
            format!("printed constant p_ee={p}"),
            // The factor is exactly 2; allow for the rounding of the division.
            (0.5 * (1.0 - 1e-12)..=2.0 * (1.0 + 1e-12)).contains(&factor),
            format!("(1 + 2p²)/6 is {factor} × the oracle limit"),
        );
    }

    let mut fits = Table::new("fit", &["T", "intercept", "slope", "r2"]);
    for (k, &t) in horizons.iter().enumerate() {
        if by_t[k].len() < 3 {
            continue;
        }
        let (x, y): (Vec<f64>, Vec<f64>) = by_t[k].iter().copied().unzip();
        let fit = linear_fit(&x, &y)?;
        fits.push(row![t, fit.intercept, fit.slope, fit.r2]);
        report.check(
            format!("fit in p² T={t}"),
            fit.r2 > 0.99,
            format!("R² = {:.5}", fit.r2),
        );
        report.set(&format!("fit_T{t}"), [fit.intercept, fit.slope, fit.r2]);
    }
    report.set("replicas", replicas);
    report.set("second_moment", setup.variance);
    report.line = format!(
        "{} rows over {} values of p_ee, R = {replicas}",
        table.rows.len(),
        p_ees.len()
    );
    report.tables.push(table);
    report.tables.push(fits);
    Ok(report)
}
