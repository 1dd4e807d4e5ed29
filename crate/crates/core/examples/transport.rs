//! Wasserstein-1, Lévy–Prokhorov and quantile couplings between empirical
//! measures on the interval and the circle.

use eelab::geometry::{
    levy_prokhorov, modified_lp, quantile_couple, w1, w1_circle, w1_interval, Domain,
    EmpiricalMeasure, IntervalUnion, PiecewiseLaw,
};

fn main() -> eelab::Result<()> {
    let a = [0.05, 0.2, 0.45, 0.9];
    let b = [0.1, 0.3, 0.5, 0.95];
    let (mu, nu) = (
        EmpiricalMeasure::uniform(Domain::UNIT_INTERVAL, &a)?,
        EmpiricalMeasure::uniform(Domain::UNIT_INTERVAL, &b)?,
    );
    println!(
        "interval: w1 = {:.4}, d_LP = {:.4}",
        w1_interval(&mu, &nu)?,
        levy_prokhorov(&mu, &nu)?
    );

    // On the circle 0.9 and 0.05 are close, so the optimal plan wraps around.
    let (p, q) = (
        EmpiricalMeasure::uniform(Domain::Circle, &a)?,
        EmpiricalMeasure::uniform(Domain::Circle, &[0.95, 0.1, 0.3, 0.5])?,
    );
    println!("circle:   w1 = {:.4}", w1_circle(&p, &q)?);

    // Distances also accept exact piecewise-uniform laws.
    let lebesgue = PiecewiseLaw::uniform(Domain::UNIT_INTERVAL);
    println!("w1(μ, Lebesgue) = {:.4}", w1(&mu, &lebesgue)?);

    let g = IntervalUnion::new(Domain::UNIT_INTERVAL, [(0.0, 0.25), (0.5, 0.75)])?;
    println!(
        "modified d_LP with G = {:?}: {:.4}",
        g.intervals(),
        modified_lp(&mu, &nu, &g)?
    );

    for y in [0.1, 0.5, 0.99] {
        println!(
            "quantile coupling: {y} ↦ {}",
            quantile_couple(&lebesgue, &nu, y)?
        );
    }
    Ok(())
}
