//! Burn-in schedules from the convergence constants, and how they react to
//! the target accuracy.

use eelab::diagnostics::{check_good_sequence, good_sequence, ScheduleConstants};
use eelab::experiments::{preset, run, Command};

fn main() -> eelab::Result<()> {
    let report = run(Command::GoodSequence, &preset("schedule")?, None)?;
    println!("{}\n", report.line);
    print!("{}", report.table("schedule").expect("schedule table"));

    let constants = ScheduleConstants {
        k: 2,
        alpha: 0.5,
        lipschitz: 1.5,
        m: 1.0,
        covering: 0.1,
        b: 2.0,
        p_ee: 0.1,
    };
    for eps0 in [0.2, 0.1, 0.05] {
        let levels = good_sequence(eps0, 0.1, 4.0, 3, &constants)?;
        check_good_sequence(&levels, 0.1, &constants)?;
        let burn_ins: Vec<String> = levels
            .iter()
            .map(|l| format!("{:.3e}", l.burn_in))
            .collect();
        println!("ε₀ = {eps0}: burn-ins {}", burn_ins.join(", "));
    }
    Ok(())
}
