mod common;

use eelab::diagnostics::bounds::exponential_moment_lambda;
use eelab::diagnostics::{
    concentration_bound_thm31, curvature, kernel_w1, power_bound, relaxation_sandwich,
    ConcentrationParams, ConstantKernel, DiscretizedChain, Kernel, Lambda, LazyUniformKernel,
    MhKernel,
};
use eelab::geometry::{circle_distance, Domain, PiecewiseLaw};
use eelab::samplers::Proposal;
use eelab::targets::{Potential, TemperedFamily};
use proptest::prelude::*;
use rand::{Rng, RngCore};

/// `K_1 ⋯ K_k` applied left to right.
struct Product<'a>(Vec<&'a dyn Kernel>);

impl Kernel for Product<'_> {
    fn domain(&self) -> Domain {
        self.0[0].domain()
    }

    fn sample(&self, x: f64, rng: &mut dyn RngCore) -> f64 {
        self.0.iter().fold(x, |y, k| k.sample(y, rng))
    }
}

#[test]
fn perturbed_powers_stay_within_the_contraction_bound() {
    let (p, delta) = (0.5, 0.01);
    let base = LazyUniformKernel::new(Domain::Circle, 0.1, p).unwrap();
    let perturbed = base.with_shift(delta);
    let mut rng = common::rng(7);
    for _ in 0..50 {
        let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
        for k in 1..=3u32 {
            let left = Product(vec![&perturbed as &dyn Kernel; k as usize]);
            let right = Product(vec![&base as &dyn Kernel; k as usize]);
            let w = kernel_w1(&left, x, &right, y, 8192, &mut rng).unwrap();
            let bound = power_bound(delta, p, k, circle_distance(x, y)).unwrap();
            assert!(
                w.value <= bound + 3.0 * w.se,
                "k = {k}: {} vs {bound}",
                w.value
            );
        }
    }
}

#[test]
fn curvature_estimates_are_at_most_one() {
    let fam = TemperedFamily::with_betas(
        Domain::Circle,
        Potential::square_tooth(4, 2.0).unwrap(),
        &[1.0],
    )
    .unwrap();
    let mh = MhKernel::new(
        fam.density(0).unwrap().clone(),
        Proposal::Ball { radius: 0.05 },
    )
    .unwrap();
    let lazy = LazyUniformKernel::new(Domain::Circle, 0.2, 0.3).unwrap();
    let constant = ConstantKernel(PiecewiseLaw::uniform(Domain::Circle));
    let mut rng = common::rng(8);
    for _ in 0..20 {
        let (x, y) = (rng.random::<f64>(), rng.random::<f64>());
        for k in [&mh as &dyn Kernel, &lazy, &constant] {
            assert!(curvature(k, k, x, y, 512, &mut rng).unwrap().value <= 1.0);
        }
        let c = curvature(&constant, &constant, x, y, 512, &mut rng).unwrap();
        assert!(c.value >= 1.0 - 3.0 * c.se - 1e-12);
    }
}

#[test]
fn exponential_moments_obey_the_variance_inequality() {
    let families = [
        TemperedFamily::with_betas(Domain::Circle, Potential::Flat, &[1.0]).unwrap(),
        TemperedFamily::with_betas(
            Domain::Circle,
            Potential::square_tooth(4, 3.0).unwrap(),
            &[1.0],
        )
        .unwrap(),
    ];
    for fam in &families {
        let chain = DiscretizedChain::mh(fam.density(0).unwrap(), 0.05, 256).unwrap();
        let sigma = chain.granularity();
        // φ = d(·, 0) is 1-Lipschitz, so A = 1 and B = 0.
        let phi: Vec<f64> = chain
            .midpoints()
            .iter()
            .map(|&x| circle_distance(x, 0.0))
            .collect();
        let lambda = exponential_moment_lambda(1.0, 0.0, sigma);
        assert!(lambda.is_finite() && lambda > 0.0);
        for l in [lambda, lambda / 2.0, lambda / 10.0] {
            assert!(chain.exponential_moment_gap(&phi, l) <= 1e-12);
        }
    }
}

#[test]
fn relaxation_time_sits_in_its_sandwich_on_a_coarse_grid() {
    let flat = TemperedFamily::with_betas(Domain::Circle, Potential::Flat, &[1.0]).unwrap();
    for c in [0.05, 0.1] {
        let tau = DiscretizedChain::mh(flat.density(0).unwrap(), c, 400)
            .unwrap()
            .relaxation_time()
            .unwrap();
        let (lo, hi) = relaxation_sandwich(c).unwrap();
        assert!(lo <= tau && tau <= hi, "τ = {tau} outside [{lo}, {hi}]");
    }
}

fn params() -> impl Strategy<Value = ConcentrationParams> {
    (0.05..1.0f64, 0.0..0.5f64, 1.0..1000.0f64, 0.0..100.0f64).prop_map(
        |(kappa, sigma_inf, t, t_b)| ConcentrationParams {
            kappa,
            c_v: 0.0,
            sigma_inf,
            t,
            t_b,
            delta: 0.0,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn auto_lambda_beats_fixed_choices(p in params(), r in 0.0..1.0f64, s in 0.01..1000.0f64, fracs in prop::collection::vec(0.0..=1.0f64, 5)) {
        let auto = concentration_bound_thm31(&p, r, Lambda::Auto, s).unwrap();
        for f in fracs {
            let fixed = concentration_bound_thm31(&p, r, Lambda::Fixed(f * p.lambda_max()), s).unwrap();
            prop_assert!(auto <= fixed * (1.0 + 1e-12));
        }
        prop_assert!(concentration_bound_thm31(&p, 0.0, Lambda::Auto, s).unwrap() >= 1.0);
    }
}
