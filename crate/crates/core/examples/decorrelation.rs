//! `compare-autocov` at reduced size: autocorrelation of the centered
//! coordinate under equi-energy, parallel tempering and Metropolis on eight
//! wells, next to the closed-form lag bounds.

use eelab::experiments::{preset, run, Command};

fn main() -> eelab::Result<()> {
    let mut cfg = preset("square-tooth")?;
    // A shorter burn-in and window than the shipped preset; Metropolis
    // stays censored at this window.
    cfg.experiment.t_b = Some(20_000);
    cfg.experiment.window = Some(16_384);
    cfg.experiment.replicas = Some(40);
    let report = run(Command::CompareAutocov, &cfg, None)?;
    println!("{}\n", report.line);
    print!("{}", report.table("lags").expect("lags table"));
    let autocov = report.table("autocov").expect("autocov table");
    println!("\nfirst lags of the normalized autocovariance:");
    let mut head = autocov.clone();
    head.rows.truncate(12);
    print!("{head}");
    Ok(())
}
