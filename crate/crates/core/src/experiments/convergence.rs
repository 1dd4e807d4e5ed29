//! `kernel-distance`: `D(K_T^{(0)}, K∞^{(0)})` as the level-1 history grows.

use super::replicas::{estimate_mean, map_replicas};
use super::report::{Report, Table};
use super::{Command, Ctx, UniformSetup};
use crate::diagnostics::{
    kernel_distance, uniform_grid, EmpiricalEeKernel, LimitingEeKernel, DEFAULT_SAMPLES,
};
use crate::error::{Error, Result};
use crate::row;
use crate::samplers::MultiLevelRun;

pub(super) fn run(ctx: &Ctx) -> Result<Report> {
    let cfg = ctx.cfg;
    let setup = UniformSetup::new(cfg)?;
    let ex = &cfg.experiment;
    let mut times = ex.t.clone();
    times.sort_unstable();
    times.dedup();
    if times.is_empty() || times[0] == 0 {
        return Err(Error::config("experiment.T needs positive history lengths"));
    }
    let replicas = cfg.replicas(64);
    let grid = uniform_grid(setup.domain, ex.grid.unwrap_or(8));
    let r0 = &setup.run;
    let limit =
        LimitingEeKernel::new(r0.family.clone(), 0, r0.rings.clone(), r0.proposal, r0.p_ee)?;
    let mut run = setup.run.clone();
    // Only the level-1 history matters; level 0 never starts.
    run.t_end = *times.last().expect("nonempty");
    run.levels[0].burn_in = run.t_end;
    run.validate()?;

    let per_replica = map_replicas(&ctx.pool, replicas, |r| {
        let mut engine = MultiLevelRun::new(&run, ctx.tag.seed, r)?;
        engine.run(&mut |_: usize, _: usize, _: f64, _| {})?;
        let history = engine.history(1);
        times
            .iter()
            .map(|&t| {
                let emp = EmpiricalEeKernel::new(
                    run.family.clone(),
                    0,
                    run.rings.clone(),
                    run.proposal,
                    run.p_ee,
                    &history[..=t],
                )?;
                Ok(
                    kernel_distance(&emp, &limit, &grid, DEFAULT_SAMPLES, 1.0, ctx.tag.seed ^ r)?
                        .max
                        .value,
                )
            })
            .collect::<Result<Vec<f64>>>()
    })?;

    let mut report = ctx.report(Command::KernelDistance);
    let mut table = Table::new(
        "kernel_distance",
        &["T", "estimate", "se", "replicas", "digest", "seed"],
    );
    let mut rows = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let values: Vec<f64> = per_replica.iter().map(|v| v[k]).collect();
        let row = estimate_mean(&values, &ctx.tag)?;
        table.push(row![
            t,
            row.estimate,
            row.se,
            row.replicas,
            row.digest,
            row.seed
        ]);
        if r0.p_ee == 0.0 {
            report.check(
                format!("vanishes T={t}"),
                row.estimate <= 3.0 * row.se,
                format!("D = {:.3e}, se {:.1e}", row.estimate, row.se),
            );
        } else {
            report.check(
                format!("resolved T={t}"),
                row.estimate > 3.0 * row.se,
                format!("D = {:.4e}, se {:.1e}", row.estimate, row.se),
            );
        }
        rows.push(row);
    }
    if r0.p_ee > 0.0 && times.len() >= 2 {
        let ratio = rows[0].estimate / rows[rows.len() - 1].estimate;
        report.set("ratio", ratio);
        report.check(
            "decay",
            ratio >= 1.5,
            format!(
                "D(T = {}) / D(T = {}) = {ratio:.3}",
                times[0],
                times[times.len() - 1]
            ),
        );
    }
    report.set("replicas", replicas);
    report.line = rows
        .iter()
        .zip(&times)
        .map(|(r, t)| format!("D({t}) = {:.4}", r.estimate))
        .collect::<Vec<_>>()
        .join(", ");
    report.tables.push(table);
    Ok(report)
}
