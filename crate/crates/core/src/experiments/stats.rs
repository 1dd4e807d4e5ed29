//! Across-replica estimators.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use statrs::distribution::{Beta, ContinuousCDF};

use crate::error::{Error, Result};

/// Sample mean and its standard error `sd/√R`.
pub fn mean_se(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 2 {
        return Err(Error::TooFewSamples(format!(
            "{} replicas, need 2",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    Ok((mean, (sample_variance(xs) / n).sqrt()))
}

/// Unbiased sample variance.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Sample variance with its delete-one jackknife standard error.
pub fn variance_jackknife(xs: &[f64]) -> Result<(f64, f64)> {
    if xs.len() < 3 {
        return Err(Error::TooFewSamples(format!(
            "{} replicas, need 3",
            xs.len()
        )));
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let d2: Vec<f64> = xs.iter().map(|x| (x - mean).powi(2)).collect();
    let total: f64 = d2.iter().sum();
    // Leaving out x_i removes n d_i²/(n − 1) from the centered sum of squares.
    let loo: Vec<f64> = d2
        .iter()
        .map(|d| (total - n * d / (n - 1.0)) / (n - 2.0))
        .collect();
    let loo_mean = loo.iter().sum::<f64>() / n;
    let se = ((n - 1.0) / n * loo.iter().map(|v| (v - loo_mean).powi(2)).sum::<f64>()).sqrt();
    Ok((total / (n - 1.0), se))
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub intercept: f64,
    pub slope: f64,
    pub r2: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::TooFewSamples(
            "need at least two (x, y) pairs of equal length".into(),
        ));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::range("regressor is constant"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum();
    let r2 = if syy > 0.0 { 1.0 - sse / syy } else { 1.0 };
    Ok(LinearFit {
        intercept,
        slope,
        r2,
    })
}

/// Fit `y ≈ a·x^slope` on log scales; all values must be positive.
pub fn power_law_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.iter().chain(y).any(|&v| !(v > 0.0)) {
        return Err(Error::range("power-law fit needs positive values"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    linear_fit(&lx, &ly)
}

/// Exact two-sided Clopper–Pearson interval for `k` successes in `n` trials.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> Result<(f64, f64)> {
    if n == 0 || k > n || !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::range(format!(
            "bad binomial interval request k = {k}, n = {n}"
        )));
    }
    let tail = (1.0 - confidence) / 2.0;
    let quantile = |a: f64, b: f64, q: f64| -> Result<f64> {
        Ok(Beta::new(a, b)
            .map_err(|e| Error::range(e.to_string()))?
            .inverse_cdf(q))
    };
    let (kf, nf) = (k as f64, n as f64);
    let lo = if k == 0 {
        0.0
    } else {
        quantile(kf, nf - kf + 1.0, tail)?
    };
    let hi = if k == n {
        1.0
    } else {
        quantile(kf + 1.0, nf - kf, 1.0 - tail)?
    };
    Ok((lo, hi))
}

/// FFT plan for lagged products of series of one length.
#[derive(Clone)]
pub struct LagProducts {
    len: usize,
    size: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for LagProducts {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LagProducts")
            .field("len", &self.len)
            .finish()
    }
}

impl LagProducts {
    pub fn new(len: usize) -> Self {
        let size = (2 * len).next_power_of_two();
        let mut planner = FftPlanner::new();
        LagProducts {
            len,
            size,
            forward: planner.plan_fft_forward(size),
            inverse: planner.plan_fft_inverse(size),
        }
    }

    /// `s(k) = Σ_t x_t x_{t+k}` for `0 ≤ k < len`.
    pub fn sums(&self, xs: &[f64]) -> Vec<f64> {
        assert_eq!(xs.len(), self.len, "series length differs from the plan");
        let mut buf: Vec<Complex<f64>> = xs.iter().map(|&x| Complex::new(x, 0.0)).collect();
        buf.resize(self.size, Complex::new(0.0, 0.0));
        self.forward.process(&mut buf);
        for z in &mut buf {
            *z = Complex::new(z.norm_sqr(), 0.0);
        }
        self.inverse.process(&mut buf);
        buf[..self.len]
            .iter()
            .map(|z| z.re / self.size as f64)
            .collect()
    }
}

/// First index at which `rho` drops below `threshold`.
pub fn first_below(rho: &[f64], threshold: f64) -> Option<usize> {
    rho.iter().position(|&r| r < threshold)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_variance() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let (m, se) = mean_se(&xs).unwrap();
        assert_eq!(m, 2.5);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-15);
        assert!(mean_se(&[1.0]).is_err());
    }

    #[test]
    fn jackknife_matches_brute_force() {
        let xs = [0.3, -1.2, 2.5, 0.7, 0.0, 1.1];
        let (v, se) = variance_jackknife(&xs).unwrap();
        assert!((v - sample_variance(&xs)).abs() < 1e-14);
        let n = xs.len() as f64;
        let loo: Vec<f64> = (0..xs.len())
            .map(|i| {
                let rest: Vec<f64> = xs
                    .iter()
                    .enumerate()
                    .filter(|p| p.0 != i)
                    .map(|p| *p.1)
                    .collect();
                sample_variance(&rest)
            })
            .collect();
        let m = loo.iter().sum::<f64>() / n;
        let brute = ((n - 1.0) / n * loo.iter().map(|v| (v - m).powi(2)).sum::<f64>()).sqrt();
        assert!((se - brute).abs() < 1e-13);
    }

    #[test]
    fn fits() {
        let x = [1.0, 2.0, 3.0];
        let f = linear_fit(&x, &[3.0, 5.0, 7.0]).unwrap();
        assert!(
            (f.slope - 2.0).abs() < 1e-14
                && (f.intercept - 1.0).abs() < 1e-14
                && (f.r2 - 1.0).abs() < 1e-14
        );
        let p = power_law_fit(&[1.0, 2.0, 4.0], &[1.0, 0.5, 0.25]).unwrap();
        assert!((p.slope + 1.0).abs() < 1e-14);
        assert!(power_law_fit(&[1.0, 2.0], &[1.0, -1.0]).is_err());
        assert!(linear_fit(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn clopper_pearson_known_values() {
        let (lo, hi) = clopper_pearson(0, 10, 0.95).unwrap();
        assert_eq!(lo, 0.0);
        assert!((hi - (1.0 - 0.025f64.powf(0.1))).abs() < 1e-9);
        let (lo, hi) = clopper_pearson(10, 10, 0.95).unwrap();
        assert!((lo - 0.025f64.powf(0.1)).abs() < 1e-9);
        assert_eq!(hi, 1.0);
        let (lo, hi) = clopper_pearson(5, 10, 0.99).unwrap();
        assert!(lo < 0.5 && hi > 0.5 && (lo + hi - 1.0).abs() < 1e-9);
    }

    #[test]
    fn lag_products_match_direct_sums() {
        let xs: Vec<f64> = (0..37).map(|i| ((i * 7919) % 23) as f64 - 11.0).collect();
        let s = LagProducts::new(xs.len()).sums(&xs);
        for k in 0..xs.len() {
            let direct: f64 = (0..xs.len() - k).map(|t| xs[t] * xs[t + k]).sum();
            assert!((s[k] - direct).abs() < 1e-9, "{k}");
        }
        assert_eq!(first_below(&[1.0, 0.5, 0.1, 0.3], 0.2), Some(2));
        assert_eq!(first_below(&[1.0], 0.2), None);
    }
}
