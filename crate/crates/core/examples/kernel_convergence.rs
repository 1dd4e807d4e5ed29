//! Distance between the empirical equi-energy kernel built from a growing
//! level-1 history and its limit, in the uniform example.

use eelab::diagnostics::{
    kernel_distance, uniform_grid, EmpiricalEeKernel, LimitingEeKernel, DEFAULT_SAMPLES,
};
use eelab::experiments::{preset, run, Command};
use eelab::samplers::run_multilevel;

fn main() -> eelab::Result<()> {
    let cfg = preset("uniform46-kernel")?;
    let mut rc = cfg.run_config(0)?;
    rc.t_end = 8000;
    rc.levels[0].burn_in = rc.t_end;
    let trace = run_multilevel(&rc, 3, 0)?;
    let history = &trace.levels[1].points;
    let limit =
        LimitingEeKernel::new(rc.family.clone(), 0, rc.rings.clone(), rc.proposal, rc.p_ee)?;
    let grid = uniform_grid(rc.family.domain(), 8);
    for t in [250, 1000, 4000, 8000] {
        let empirical = EmpiricalEeKernel::new(
            rc.family.clone(),
            0,
            rc.rings.clone(),
            rc.proposal,
            rc.p_ee,
            &history[..t],
        )?;
        let d = kernel_distance(&empirical, &limit, &grid, DEFAULT_SAMPLES, 1.0, 9)?;
        println!("one history, T = {t:>4}: D = {} at x = {:.3}", d.max, d.at);
    }

    let report = run(Command::KernelDistance, &cfg, None)?;
    println!("\n{}", report.line);
    print!(
        "{}",
        report
            .table("kernel_distance")
            .expect("kernel_distance table")
    );
    Ok(())
}
