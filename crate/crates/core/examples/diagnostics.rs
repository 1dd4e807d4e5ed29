//! Curvature of test kernels, spectral quantities of grid chains and the
//! closed-form bounds built on them.

use eelab::diagnostics::{
    cheeger_upper, concentration_bound_thm31, curvature, granularity, relaxation_sandwich,
    uniform_grid, ConcentrationParams, DiscretizedChain, Lambda, LazyUniformKernel, MhKernel,
};
use eelab::geometry::{Domain, IntervalUnion};
use eelab::samplers::Proposal;
use eelab::targets::{Potential, TemperedFamily};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> eelab::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let lazy = LazyUniformKernel::new(Domain::UNIT_INTERVAL, 0.1, 0.5)?;
    let kappa = curvature(&lazy, &lazy, 0.2, 0.7, 4096, &mut rng)?;
    println!("lazy-uniform curvature at (0.2, 0.7): {kappa}");
    println!(
        "granularity over 16 points: {:.3}",
        granularity(&lazy, &uniform_grid(Domain::UNIT_INTERVAL, 16))?
    );

    let family =
        TemperedFamily::with_betas(Domain::Circle, Potential::square_tooth(4, 2.0)?, &[1.0])?;
    let mh = MhKernel::new(family.density(0)?.clone(), Proposal::Ball { radius: 0.05 })?;
    println!(
        "MH curvature across a wall (0.1, 0.15): {}",
        curvature(&mh, &mh, 0.1, 0.15, 4096, &mut rng)?
    );

    let chain = DiscretizedChain::mh(family.density(0)?, 0.05, 512)?;
    let well = IntervalUnion::new(Domain::Circle, [(0.0, 0.125)])?;
    println!(
        "grid chain: τ_rel = {:.1}, bottleneck {:.2e} ≤ {:.2e}",
        chain.relaxation_time()?,
        chain.bottleneck(&well)?,
        cheeger_upper(4, 2.0)
    );
    println!(
        "flat-circle sandwich for c = 0.05: {:?}",
        relaxation_sandwich(0.05)?
    );

    let params = ConcentrationParams {
        kappa: 0.5,
        c_v: 0.0,
        sigma_inf: 0.1,
        t: 10_000.0,
        t_b: 0.0,
        delta: 0.0,
    };
    for r in [0.005, 0.01, 0.02] {
        println!(
            "P[|π̂ − Eπ̂| ≥ {r}] ≤ {:.3e}",
            concentration_bound_thm31(&params, r, Lambda::Auto, 10_000.0 * 0.02)?
        );
    }
    Ok(())
}
