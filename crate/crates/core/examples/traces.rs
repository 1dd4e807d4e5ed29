//! `simulate`: full traces of a two-level equi-energy run written as CSV,
//! plus the JSON summary, into a scratch directory.

use eelab::experiments::{preset, run, Command};

fn main() -> eelab::Result<()> {
    let cfg = preset("square-tooth-trace")?;
    let report = run(Command::Simulate, &cfg, None)?;
    println!("{}", report.line);
    print!("{}", report.table("tallies").expect("tallies table"));
    let dir = std::env::temp_dir().join("eelab-traces");
    for path in report.write(&dir)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
