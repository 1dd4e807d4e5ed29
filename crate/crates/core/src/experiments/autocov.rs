//! `verify-autocov`: `E[f(X_T) f(X_{T+S})]` in the uniform example.

use super::replicas::{estimate_mean, fold_replicas, summarize, Probe};
use super::report::{Report, Table};
use super::stats::power_law_fit;
use super::{required, Command, Ctx, UniformSetup};
use crate::error::{Error, Result};
use crate::row;

pub(super) fn run(ctx: &Ctx) -> Result<Report> {
    let cfg = ctx.cfg;
    let setup = UniformSetup::new(cfg)?;
    let ex = &cfg.experiment;
    let t_b = required(&ex.t_b, "Tb")?;
    let &[t] = ex.t.as_slice() else {
        return Err(Error::config(
            "verify-autocov takes exactly one anchor time T",
        ));
    };
    if t < t_b {
        return Err(Error::config(format!("anchor T = {t} precedes Tb = {t_b}")));
    }
    let lags = ex.lags.clone();
    if lags.is_empty() || lags.contains(&0) {
        return Err(Error::config("experiment.lags needs positive lags"));
    }
    let replicas = cfg.replicas(100_000);
    let p = setup.run.p_ee;
    let mut run = setup.run.clone();
    run.levels[0].burn_in = t_b;
    run.t_end = t + lags.iter().max().expect("nonempty");
    run.validate()?;
    let probe = Probe {
        observable: setup.f.clone(),
        level: 0,
        t_b,
        horizons: Vec::new(),
        anchor: Some(t),
        lags: lags.clone(),
        conditional: Some((p, setup.mean)),
    };

    let m = setup.mean;
    let (plain, conditional) = fold_replicas(
        &ctx.pool,
        replicas,
        4096,
        |r| summarize(&run, &probe, ctx.tag.seed, r),
        (
            vec![Vec::with_capacity(replicas); lags.len()],
            vec![Vec::with_capacity(replicas); lags.len()],
        ),
        |(plain, cond): &mut (Vec<Vec<f64>>, Vec<Vec<f64>>), _, s| {
            for k in 0..s.pairs.len() {
                let (a, b) = s.pairs[k];
                plain[k].push((a - m) * (b - m));
                cond[k].push((a - m) * (s.conditional[k] - m));
            }
        },
    )?;

    let oracle = setup.oracle(p, t_b);
    let mut report = ctx.report(Command::VerifyAutocov);
    let mut table = Table::new(
        "autocov",
        &[
            "T",
            "S",
            "n",
            "plain",
            "plain_se",
            "conditional",
            "conditional_se",
            "oracle",
            "printed",
            "replicas",
            "digest",
            "seed",
        ],
    );
    let (mut ns, mut ys) = (Vec::new(), Vec::new());
    for (k, &s) in lags.iter().enumerate() {
        let a = estimate_mean(&plain[k], &ctx.tag)?;
        let c = estimate_mean(&conditional[k], &ctx.tag)?;
        let exact = oracle.cross_moment(t, t + s);
        table.push(row![
            t,
            s,
            t + s,
            a.estimate,
            a.se,
            c.estimate,
            c.se,
            exact,
            oracle.printed_cross_moment(t, s),
            replicas,
            ctx.tag.digest,
            ctx.tag.seed
        ]);
        for (name, e) in [("plain", &a), ("conditional", &c)] {
            // An exactly vanishing SE (p_ee = 0) leaves equality as the test.
            let pass = (e.estimate - exact).abs() <= 3.0 * e.se + 1e-15;
            report.check(
                format!("{name} S={s}"),
                pass,
                format!("{:.4e} vs {exact:.4e}, se {:.1e}", e.estimate, e.se),
            );
        }
        ns.push((t + s) as f64);
        ys.push(c.estimate);
    }
    if p > 0.0 && lags.len() >= 2 {
        match power_law_fit(&ns, &ys) {
            Ok(fit) => {
                report.set("exponent", fit.slope);
                report.check(
                    "power law in T + S",
                    (fit.slope + 1.0).abs() <= 0.15,
                    format!("exponent {:.4} (target −1 ± 0.15)", fit.slope),
                );
            }
            Err(e) => report.check("power law in T + S", false, e.to_string()),
        }
    }
    let s_max = lags.iter().max().copied().unwrap_or(1);
    report.set("partial_sum_oracle", oracle.partial_sum(t, s_max));
    report.set("replicas", replicas);
    report.line = format!("{} lags at T = {t}, p_ee = {p}, R = {replicas}", lags.len());
    report.tables.push(table);
    Ok(report)
}
