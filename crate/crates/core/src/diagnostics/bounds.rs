//! Closed-form concentration, mixing and autocovariance bounds.

use crate::error::{Error, Result};

/// Constants of a perturbed chain with positive curvature, as used by the
/// concentration bound for `π̂_{T,T_b}(f)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationParams {
    /// Curvature lower bound `κ ∈ (0, 1]`.
    pub kappa: f64,
    /// Lipschitz constant `C_v` of the variance envelope `𝒱`.
    pub c_v: f64,
    /// Granularity bound `Σ_∞` over the averaging window.
    pub sigma_inf: f64,
    /// Run length `T ≥ 1`.
    pub t: f64,
    pub t_b: f64,
    /// Perturbation radius `δ = sup_t D(K_t, K)`.
    pub delta: f64,
}

/// Which `λ` to use in the exponential Chebyshev step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lambda {
    /// `min(λ_max, rκT²/(8 E Σ 𝒱))`, the minimizer when admissible.
    Auto,
    Fixed(f64),
}

impl ConcentrationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa > 0.0 && self.kappa <= 1.0) {
            return Err(Error::range(format!(
                "kappa must lie in (0, 1], got {}",
                self.kappa
            )));
        }
        if !(self.t >= 1.0)
            || self.t_b < 0.0
            || self.c_v < 0.0
            || self.sigma_inf < 0.0
            || self.delta < 0.0
        {
            return Err(Error::range("need T ≥ 1 and nonnegative T_b, C_v, Σ_∞, δ"));
        }
        Ok(())
    }

    /// `κ/(480 C_v + 240)`.
    pub fn delta_max(&self) -> f64 {
        self.kappa / (480.0 * self.c_v + 240.0)
    }

    /// `κT·min(1/(16 C_v), 1/(6 Σ_∞), 1/36)`.
    pub fn lambda_max(&self) -> f64 {
        let inv = |x: f64| if x > 0.0 { 1.0 / x } else { f64::INFINITY };
        self.kappa
            * self.t
            * inv(16.0 * self.c_v)
                .min(inv(6.0 * self.sigma_inf))
                .min(1.0 / 36.0)
    }

    /// The `λ` used for a deviation `r`.
    pub fn resolve_lambda(&self, lambda: Lambda, r: f64, mean_v_sum: f64) -> Result<f64> {
        let cap = self.lambda_max();
        match lambda {
            Lambda::Auto => Ok(cap
                .min(r * self.kappa * self.t * self.t / (8.0 * mean_v_sum))
                .max(0.0)),
            Lambda::Fixed(l) if !(0.0..=cap).contains(&l) => Err(Error::range(format!(
                "lambda = {l} outside [0, λ_max = {cap}]"
            ))),
            Lambda::Fixed(l) => Ok(l),
        }
    }
}

/// Variance proxy `V²` and the largest deviation `r_max` it controls.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JoulinOllivier {
    pub v2: f64,
    pub r_max: f64,
}

impl JoulinOllivier {
    /// `2 exp(−r²/(16 V²))`, valid for `r ≤ r_max`.
    pub fn tail(&self, r: f64) -> f64 {
        2.0 * (-r * r / (16.0 * self.v2)).exp()
    }
}

/// `V² = (1/(κT))(1 + T_b/T)·sup_x σ²(x)/(n(x)κ)` given the supremum, and
/// `r_max = 4V²κT/(3σ_∞)`.
pub fn joulin_ollivier_v2(params: &ConcentrationParams, sup_ratio: f64) -> Result<JoulinOllivier> {
    params.validate()?;
    let ConcentrationParams {
        kappa,
        t,
        t_b,
        sigma_inf,
        ..
    } = *params;
    let v2 = (1.0 + t_b / t) * sup_ratio / (kappa * t);
    let r_max = if sigma_inf > 0.0 {
        4.0 * v2 * kappa * t / (3.0 * sigma_inf)
    } else {
        f64::INFINITY
    };
    Ok(JoulinOllivier { v2, r_max })
}

/// `P[|π̂ − E π̂| ≥ r] ≤ 2 e^{−λr} exp(4λ² E Σ_t 𝒱(X_t)/(κT²))` for a chain of
/// kernels within `δ < δ_max` of a `κ`-curved kernel.
pub fn concentration_bound_thm31(
    params: &ConcentrationParams,
    r: f64,
    lambda: Lambda,
    mean_v_sum: f64,
) -> Result<f64> {
    params.validate()?;
    if params.delta >= params.delta_max() {
        return Err(Error::range(format!(
            "perturbation δ = {} is not below δ_max = {}",
            params.delta,
            params.delta_max()
        )));
    }
    if !(mean_v_sum > 0.0) || r < 0.0 {
        return Err(Error::range("need r ≥ 0 and a positive variance sum"));
    }
    let l = params.resolve_lambda(lambda, r, mean_v_sum)?;
    let t2 = params.t * params.t;
    Ok(2.0 * (-l * r + 4.0 * l * l * mean_v_sum / (params.kappa * t2)).exp())
}

fn check_kappa(kappa: f64) -> Result<()> {
    if kappa > 0.0 && kappa <= 1.0 {
        Ok(())
    } else {
        Err(Error::range(format!(
            "kappa must lie in (0, 1], got {kappa}"
        )))
    }
}

/// `W(μ K_1⋯K_T, π) ≤ δ/κ + (1 − κ)^T E(x) + D_Ω Σ tails` for a chain started
/// at `x`, where `tails` are the masses escaping the contracting region.
pub fn wasserstein_mixing_bound(
    delta: f64,
    kappa: f64,
    t: u32,
    eccentricity: f64,
    diameter: f64,
    tails: &[f64],
) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(delta / kappa
        + (1.0 - kappa).powi(t as i32) * eccentricity
        + diameter * tails.iter().sum::<f64>())
}

/// `|E π̂ − π(f)| ≤ 2δ/κ + E[E(X_0)]/(κT)`.
pub fn bias_bound(delta: f64, kappa: f64, t: f64, mean_eccentricity: f64) -> Result<f64> {
    check_kappa(kappa)?;
    Ok(2.0 * delta / kappa + mean_eccentricity / (kappa * t))
}

/// `δ Σ_{i<k} (1 − κ)^i + (1 − κ)^k d`: bound on
/// `W((K_1⋯K_k)(x, ·), K^k(y, ·))` when every `K_t` is within `δ` of `K`.
pub fn power_bound(delta: f64, kappa: f64, k: u32, d: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let geometric: f64 = (0..k).map(|i| (1.0 - kappa).powi(i as i32)).sum();
    Ok(delta * geometric + (1.0 - kappa).powi(k as i32) * d)
}

/// `2δ Σ_{i<k} (1 − κ)^i + (1 − κ)^k d`: the same for two perturbed products.
pub fn power_pair_bound(delta: f64, kappa: f64, k: u32, d: f64) -> Result<f64> {
    check_kappa(kappa)?;
    let geometric: f64 = (0..k).map(|i| (1.0 - kappa).powi(i as i32)).sum();
    Ok(2.0 * delta * geometric + (1.0 - kappa).powi(k as i32) * d)
}

/// The admissible `λ` range `min(1/(3Aσ_∞), 2/(3B))` for the exponential-moment
/// inequality when `|φ(x) − φ(y)| ≤ max(A d(x, y), B)`.
pub fn exponential_moment_lambda(a: f64, b: f64, sigma_inf: f64) -> f64 {
    let inv = |x: f64| if x > 0.0 { 1.0 / x } else { f64::INFINITY };
    inv(3.0 * a * sigma_inf).min(2.0 * inv(3.0 * b))
}

/// `[1/(8c²), 8/c²]`, the relaxation-time range of the ball walk on the
/// circle for `c < 1/8`.
pub fn relaxation_sandwich(c: f64) -> Result<(f64, f64)> {
    if !(c > 0.0 && c < 0.125) {
        return Err(Error::range(format!("ball radius {c} outside (0, 1/8)")));
    }
    Ok((1.0 / (8.0 * c * c), 8.0 / (c * c)))
}

/// `8M e^{−H}`, bounding the bottleneck ratio of one well.
pub fn cheeger_upper(wells: usize, depth: f64) -> f64 {
    8.0 * wells as f64 * (-depth).exp()
}

/// Terms of the intermediate-time autocovariance bound for the equi-energy
/// sampler on the square-tooth target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EeAutocovBound {
    /// `min(p(1 − p)M/32, p/(2c))`.
    pub a1: f64,
    /// `((1 − p)/4)(p/4)(cM/16 − ε)`.
    pub c1: f64,
    /// `(1/(2c)) min(p, 𝒞₁)`.
    pub a: f64,
    /// `(16eH/(Ac)) e^{−H}`.
    pub a2: f64,
    /// `2e^{−A₁c⌊S/4⌋} + 2ε + A₂`.
    pub bound: f64,
}

/// Evaluate the equi-energy autocovariance bound; `ε` must lie in
/// `(0, min(1/512, cM/384))`.
pub fn ee_autocov_bound(
    wells: usize,
    c: f64,
    p_ee: f64,
    eps: f64,
    depth: f64,
    lag: u64,
) -> Result<EeAutocovBound> {
    let m = wells as f64;
    if wells < 2 || !(c > 0.0 && c < 0.5) || !(p_ee > 0.0 && p_ee < 1.0) || depth < 0.0 {
        return Err(Error::range(
            "need M ≥ 2, c ∈ (0, 1/2), p_ee ∈ (0, 1), H ≥ 0",
        ));
    }
    let eps_cap = (1.0 / 512.0f64).min(c * m / 384.0);
    if !(eps > 0.0 && eps < eps_cap) {
        return Err(Error::range(format!("ε = {eps} outside (0, {eps_cap})")));
    }
    let a1 = (p_ee * (1.0 - p_ee) * m / 32.0).min(p_ee / (2.0 * c));
    let c1 = (1.0 - p_ee) / 4.0 * (p_ee / 4.0) * (c * m / 16.0 - eps);
    let a = p_ee.min(c1) / (2.0 * c);
    let a2 = 16.0 * std::f64::consts::E * depth / (a * c) * (-depth).exp();
    let bound = 2.0 * (-a1 * c * (lag / 4) as f64).exp() + 2.0 * eps + a2;
    Ok(EeAutocovBound {
        a1,
        c1,
        a,
        a2,
        bound,
    })
}

/// Smallest burn-in for which the equi-energy bound applies:
/// `110592 c⁻² (ε⁻¹ + 1)² log(4608 (ε⁻¹ + 1)²)`.
pub fn ee_min_burn_in(c: f64, eps: f64) -> f64 {
    let s = (1.0 / eps + 1.0).powi(2);
    110_592.0 / (c * c) * s * (4608.0 * s).ln()
}

/// Probability `1 − (ε/12) min(k, 1/(1 − ε^{ε/2}))` with which the bound
/// holds simultaneously for all lags up to `T(1 + kε/2)`; `k = None` is `∞`.
pub fn ee_success_probability(eps: f64, k: Option<u64>) -> f64 {
    let tail = 1.0 / (1.0 - eps.powf(eps / 2.0));
    let m = k.map_or(tail, |k| (k as f64).min(tail));
    1.0 - eps / 12.0 * m
}

/// Largest lag covered: `T(1 + kε/2)`.
pub fn ee_max_lag(t: f64, eps: f64, k: Option<u64>) -> f64 {
    k.map_or(f64::INFINITY, |k| t * (1.0 + k as f64 * eps / 2.0))
}

/// `1/32 − e^{−1/(1024 M² c² S)}`, the parallel-tempering autocovariance lower
/// bound given both levels start in one well's core; needs `M` even.
pub fn pt_autocov_lower(wells: usize, c: f64, lag: u64) -> Result<f64> {
    if wells < 2 || !wells.is_multiple_of(2) {
        return Err(Error::range(format!(
            "the well count must be even and at least 2, got {wells}"
        )));
    }
    if !(c > 0.0) || lag == 0 {
        return Err(Error::range("need c > 0 and a positive lag"));
    }
    let m = wells as f64;
    Ok(1.0 / 32.0 - (-1.0 / (1024.0 * m * m * c * c * lag as f64)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ConcentrationParams {
        ConcentrationParams {
            kappa: 1.0,
            c_v: 0.0,
            sigma_inf: 0.5,
            t: 36.0,
            t_b: 0.0,
            delta: 0.0,
        }
    }

    #[test]
    fn constants() {
        let p = params();
        assert_eq!(p.delta_max(), 1.0 / 240.0);
        assert!((p.lambda_max() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn v2_examples() {
        let p = ConcentrationParams {
            t: 100.0,
            ..params()
        };
        let jo = joulin_ollivier_v2(&p, 1.0).unwrap();
        assert!((jo.v2 - 0.01).abs() < 1e-15);
        assert!((jo.tail(0.4) - 2.0 * (-1.0f64).exp()).abs() < 1e-15);
        let a = joulin_ollivier_v2(&ConcentrationParams { t_b: 10.0, ..p }, 1.0)
            .unwrap()
            .v2;
        let b = joulin_ollivier_v2(&ConcentrationParams { t_b: 20.0, ..p }, 1.0)
            .unwrap()
            .v2;
        assert!((b / a - 1.2 / 1.1).abs() < 1e-12);
        assert!(joulin_ollivier_v2(&ConcentrationParams { kappa: 0.0, ..p }, 1.0).is_err());
    }

    #[test]
    fn auto_lambda_is_optimal() {
        let p = ConcentrationParams {
            t: 400.0,
            sigma_inf: 0.01,
            ..params()
        };
        let (r, s) = (0.1, 400.0);
        let auto = concentration_bound_thm31(&p, r, Lambda::Auto, s).unwrap();
        assert!((auto - 2.0 * (-r * r * p.t / 16.0).exp()).abs() < 1e-12);
        for l in [0.5, 1.0, 2.0, 5.0, 9.0] {
            assert!(auto <= concentration_bound_thm31(&p, r, Lambda::Fixed(l), s).unwrap() + 1e-15);
        }
        assert!(concentration_bound_thm31(&p, 0.0, Lambda::Auto, s).unwrap() >= 1.0);
        assert!(concentration_bound_thm31(&p, r, Lambda::Fixed(1e6), s).is_err());
        let bad = ConcentrationParams {
            delta: 1.0 / 240.0,
            ..p
        };
        assert!(concentration_bound_thm31(&bad, r, Lambda::Auto, s).is_err());
    }

    #[test]
    fn mixing_bounds() {
        assert_eq!(
            wasserstein_mixing_bound(0.0, 0.5, 3, 0.25, 0.5, &[]).unwrap(),
            0.125 * 0.25
        );
        assert!(
            (wasserstein_mixing_bound(0.01, 0.5, 10_000, 0.25, 0.5, &[]).unwrap() - 0.02).abs()
                < 1e-15
        );
        assert!(
            (wasserstein_mixing_bound(0.01, 1.0, 1, 0.25, 0.5, &[0.1]).unwrap() - 0.06).abs()
                < 1e-15
        );
        assert!((bias_bound(0.01, 0.5, 100.0, 0.25).unwrap() - 0.045).abs() < 1e-15);
        assert!((power_bound(0.1, 0.5, 2, 1.0).unwrap() - (0.15 + 0.25)).abs() < 1e-15);
        assert!((power_pair_bound(0.1, 0.5, 2, 1.0).unwrap() - (0.3 + 0.25)).abs() < 1e-15);
        assert!(bias_bound(0.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn spectral_and_cheeger() {
        let (lo, hi) = relaxation_sandwich(0.05).unwrap();
        assert!((lo - 50.0).abs() < 1e-9 && (hi - 3200.0).abs() < 1e-9);
        assert!(relaxation_sandwich(0.2).is_err());
        assert!((cheeger_upper(4, 5.0) - 0.2156).abs() < 1e-4);
    }

    #[test]
    fn autocov_bounds() {
        let b = ee_autocov_bound(8, 1.0 / 64.0, 0.1, 1e-4, 4.0, 100).unwrap();
        assert!((b.a1 - 0.0225).abs() < 1e-15);
        assert!(ee_autocov_bound(8, 1.0 / 64.0, 0.1, 0.01, 4.0, 100).is_err());
        let pt = pt_autocov_lower(8, 1.0 / 4096.0, 32).unwrap();
        assert!((pt - (1.0 / 32.0 - (-8.0f64).exp())).abs() < 1e-15);
        assert!((pt - 0.03091).abs() < 1e-5);
        // vacuous once the exponent drops below ln 32
        let m = 8.0;
        let c = 1.0 / 64.0;
        let s = (1.0 / (1024.0 * m * m * c * c * 32f64.ln())).ceil() as u64;
        assert!(pt_autocov_lower(8, c, s).unwrap() <= 0.0);
        assert!(pt_autocov_lower(7, c, s).is_err());
        assert!(ee_success_probability(1e-3, Some(1)) > 0.9999);
        assert!(ee_min_burn_in(0.1, 0.001) > 1e12);
    }
}
