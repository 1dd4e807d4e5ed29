//! Empirical tails of the running average of a lazy-uniform chain against
//! the concentration bound, with and without a perturbation.

use eelab::experiments::{preset, run, Command};

fn main() -> eelab::Result<()> {
    let mut cfg = preset("lazy-uniform")?;
    cfg.experiment.replicas = Some(2000);
    cfg.experiment.deltas = Some(vec![0.0, 0.25, 0.5]);
    let report = run(Command::Concentration, &cfg, None)?;
    println!("{}\n", report.line);
    print!("{}", report.table("coverage").expect("coverage table"));
    for c in &report.checks {
        println!("{c}");
    }
    Ok(())
}
