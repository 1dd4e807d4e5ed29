//! `curvature-report`: relaxation times of the flat ball walk, bottleneck
//! constants of square-tooth wells and curvature of the lazy-uniform kernel.

use eelab::experiments::{preset, run, Command};

fn main() -> eelab::Result<()> {
    let mut cfg = preset("spectral")?;
    // A coarser grid than the preset keeps the eigenvalue solves quick.
    cfg.experiment.cells = Some(512);
    cfg.experiment.radii = Some(vec![0.05, 0.1]);
    let report = run(Command::CurvatureReport, &cfg, None)?;
    println!("{}\n", report.line);
    print!("{}", report.table("curvature").expect("curvature table"));
    Ok(())
}
