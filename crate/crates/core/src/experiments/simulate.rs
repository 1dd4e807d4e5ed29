//! `simulate`: full traces of a multi-level run.

use std::collections::BTreeMap;

use super::replicas::map_replicas;
use super::report::{Report, Table};
use super::{Command, Ctx};
use crate::error::Result;
use crate::row;
use crate::samplers::{run_multilevel, MoveKind};
use crate::targets::EnergyRingSpec;

/// Run length when the config sets none.
const DEFAULT_END: usize = 1000;

pub(super) fn run(ctx: &Ctx) -> Result<Report> {
    let cfg = ctx.cfg;
    let run = cfg.run_config(DEFAULT_END)?;
    let replicas = cfg.replicas(1);
    let traces = map_replicas(&ctx.pool, replicas, |r| {
        run_multilevel(&run, ctx.tag.seed, r)
    })?;

    let mut trace = Table::new("trace", &["replica", "level", "t", "x", "move_kind"]);
    let mut tallies: BTreeMap<(usize, MoveKind), u64> = BTreeMap::new();
    for tr in &traces {
        for (level, t, x, kind) in tr.rows() {
            trace.push(row![tr.replica, level, t, x, kind]);
            *tallies.entry((level, kind)).or_default() += 1;
        }
    }
    let mut counts = Table::new("tallies", &["level", "move_kind", "count"]);
    for (&(level, kind), &n) in &tallies {
        counts.push(row![level, kind, n]);
    }

    let mut report = ctx.report(Command::Simulate);
    if let (Some(k), true) = (run.rings.ladder_len(), run.family.len() > 1) {
        let mut rings = vec![0u64; k];
        for tr in &traces {
            for &x in &tr.levels[1].points {
                if let Some(i) = run.rings.ladder_index(run.family.energy(x))? {
                    rings[i] += 1;
                }
            }
        }
        report.set("level1_ring_occupancy", rings);
    } else if run.rings == EnergyRingSpec::Full && run.family.len() > 1 {
        report.set(
            "level1_ring_occupancy",
            [traces.iter().map(|t| t.levels[1].len()).sum::<usize>()],
        );
    }
    report.set("replicas", replicas);
    report.set("t_end", run.t_end);
    report.line = format!(
        "{} states from {replicas} replicas to t = {}",
        trace.rows.len(),
        run.t_end
    );
    report.tables.push(trace);
    report.tables.push(counts);
    Ok(report)
}
