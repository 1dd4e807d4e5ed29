//! The two-level uniform example: exact variance and lagged-product oracles
//! next to `verify-variance` and `verify-autocov` runs at reduced size.

use eelab::experiments::{preset, run, Command, UniformExample};

fn main() -> eelab::Result<()> {
    let oracle = UniformExample::new(0.5, 100, 1.0 / 12.0);
    for t in [100, 1000, 10_000] {
        println!("T = {t:>5}: T·Var = {:.5}", t as f64 * oracle.variance(t));
    }
    println!(
        "limit {:.5}, printed constant {:.5}",
        oracle.limit_constant(),
        oracle.printed_constant()
    );

    let mut cfg = preset("uniform46")?;
    cfg.experiment.p_ees = Some(vec![0.0, 0.5, 1.0]);
    let report = run(Command::VerifyVariance, &cfg, None)?;
    println!("\n{}", report.line);
    print!("{}", report.table("variance").expect("variance table"));

    let mut cfg = preset("uniform46-autocov")?;
    cfg.experiment.replicas = Some(20_000);
    let report = run(Command::VerifyAutocov, &cfg, None)?;
    println!("\n{}", report.line);
    print!("{}", report.table("autocov").expect("autocov table"));
    Ok(())
}
