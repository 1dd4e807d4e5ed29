//! `good-sequence`: burn-in and tolerance schedules from the constants of
//! the multi-level convergence argument.

use super::report::{Report, Table};
use super::{Command, Ctx};
use crate::diagnostics::{check_good_sequence, good_sequence, ScheduleConstants};
use crate::error::{Error, Result};
use crate::row;

pub(super) fn run(ctx: &Ctx) -> Result<Report> {
    let s = ctx
        .cfg
        .schedule
        .as_ref()
        .ok_or_else(|| Error::config("missing [schedule] section"))?;
    let constants = ScheduleConstants {
        k: s.k,
        alpha: s.alpha,
        lipschitz: s.lipschitz,
        m: s.m,
        covering: s.covering,
        b: s.b,
        p_ee: s.p_ee,
    };
    let levels = good_sequence(s.eps0, s.delta, s.g0, s.levels, &constants)?;
    let mut report = ctx.report(Command::GoodSequence);
    let mut table = Table::new("schedule", &["level", "G", "B", "burn_in", "eps"]);
    for (i, l) in levels.iter().enumerate() {
        table.push(row![i, l.g, l.b, l.burn_in, l.eps]);
    }
    let verdict = check_good_sequence(&levels, s.delta, &constants);
    report.check(
        "good sequence",
        verdict.is_ok(),
        verdict
            .err()
            .map_or("all four inequalities hold".into(), |e| e.to_string()),
    );
    report.set("target_burn_in", levels[0].burn_in);
    report.line = format!(
        "{} levels, target burn-in {:e}",
        levels.len(),
        levels[0].burn_in
    );
    report.tables.push(table);
    Ok(report)
}
