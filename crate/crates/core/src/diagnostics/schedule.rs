//! Burn-in and tolerance schedules for the multi-level convergence argument.

use crate::error::{Error, Result};

/// Constants of the per-level concentration and kernel-continuity assumptions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleConstants {
    /// Power `k` at which the limiting kernels contract.
    pub k: u32,
    /// Concentration rate `α`.
    pub alpha: f64,
    /// W1-Lipschitz constant `𝒞` of the limiting kernels.
    pub lipschitz: f64,
    /// Covering exponent `m`.
    pub m: f64,
    /// Covering constant `𝒩`.
    pub covering: f64,
    /// Constant `ℬ` turning `W(F, π_{i+1}) < ε` into `D(K∞, K_t) ≤ ℬ p_ee √ε`.
    pub b: f64,
    pub p_ee: f64,
}

impl ScheduleConstants {
    fn validate(&self) -> Result<()> {
        let positive = [self.alpha, self.lipschitz, self.b, self.p_ee]
            .iter()
            .all(|&x| x > 0.0);
        if self.k == 0 || !positive || self.m < 0.0 || self.covering < 0.0 {
            return Err(Error::range(
                "schedule constants must be positive with k ≥ 1",
            ));
        }
        Ok(())
    }

    fn drift(&self) -> f64 {
        2.0 + self.k as f64 * self.lipschitz.powi(self.k as i32)
    }

    /// `𝓗₁(ε, δ, S) = max(8(2 + k𝒞^k)/(αε), 4S/ε,
    /// (32k³/(αε²))(2 + log 2k + log δ⁻¹ + 𝒩(4/ε)^m))`.
    pub fn h1(&self, eps: f64, delta: f64, s: f64) -> f64 {
        let k = self.k as f64;
        let a = 8.0 * self.drift() / (self.alpha * eps);
        let b = 4.0 * s / eps;
        let c = 32.0 * k.powi(3) / (self.alpha * eps * eps)
            * (2.0
                + (2.0 * k).ln()
                + (1.0 / delta).ln()
                + self.covering * (4.0 / eps).powf(self.m));
        a.max(b).max(c)
    }

    /// `𝓗₂(ε, δ, S) = 16(2 + k𝒞^k)/(εα)`.
    pub fn h2(&self, eps: f64, _delta: f64, _s: f64) -> f64 {
        16.0 * self.drift() / (eps * self.alpha)
    }

    fn shrink(&self, eps: f64) -> f64 {
        eps * eps / (self.b * self.b * self.p_ee * self.p_ee)
    }

    /// `𝓗₃(ε, δ, S) = 𝓗₁(ε²/(ℬ² p_ee²), δ, S)`.
    pub fn h3(&self, eps: f64, delta: f64, s: f64) -> f64 {
        self.h1(self.shrink(eps), delta, s)
    }

    /// `𝓗₄(ε, δ, S) = 𝓗₂(ε²/(ℬ² p_ee²), δ, S)`.
    pub fn h4(&self, eps: f64, delta: f64, s: f64) -> f64 {
        self.h2(self.shrink(eps), delta, s)
    }
}

/// One level of a good sequence. Values are integers stored as `f64`, since
/// they outgrow `u64` after a few levels; `G_𝒦` is `∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleLevel {
    pub g: f64,
    pub b: f64,
    pub burn_in: f64,
    pub eps: f64,
}

/// Build the schedule `{G_i, B_i, T_b^{(i)}, ε_i}_{i=0}^{𝒦}`:
/// `G_i = 2iG_{i−1} + 2iB_{i−1} + 2i`,
/// `ε_i⁻¹ = ⌈𝓗₃(ε_{i−1}, δ/(𝒦+1), G_i)⌉`, `B_i = ⌈𝓗₄(ε_{i−1}, δ/(𝒦+1), G_i)⌉`
/// for `1 ≤ i < 𝒦`; `G_𝒦 = ∞`, `B_𝒦 = T_b^{(𝒦)} = 0`, and burn-ins
/// `T_b^{(i−1)} = T_b^{(i)} + B_i`.
pub fn good_sequence(
    eps0: f64,
    delta: f64,
    g0: f64,
    top: usize,
    constants: &ScheduleConstants,
) -> Result<Vec<ScheduleLevel>> {
    constants.validate()?;
    if !(eps0 > 0.0 && eps0 < 1.0 && delta > 0.0 && delta < 1.0) {
        return Err(Error::range("need ε₀, δ ∈ (0, 1)"));
    }
    if !(g0 > 1.0) || top == 0 {
        return Err(Error::range(
            "need G₀ > 1 and at least one level above the target",
        ));
    }
    let share = delta / (top as f64 + 1.0);
    let mut levels = vec![ScheduleLevel {
        g: g0,
        b: 0.0,
        burn_in: 0.0,
        eps: eps0,
    }];
    for i in 1..top {
        let prev = levels[i - 1];
        let fi = i as f64;
        let g = 2.0 * fi * prev.g + 2.0 * fi * prev.b + 2.0 * fi;
        let eps = 1.0 / constants.h3(prev.eps, share, g).ceil();
        let b = constants.h4(prev.eps, share, g).ceil();
        levels.push(ScheduleLevel {
            g,
            b,
            burn_in: 0.0,
            eps,
        });
    }
    levels.push(ScheduleLevel {
        g: f64::INFINITY,
        b: 0.0,
        burn_in: 0.0,
        eps: 0.0,
    });
    for i in (1..=top).rev() {
        levels[i - 1].burn_in = levels[i].burn_in + levels[i].b;
    }
    Ok(levels)
}

/// Check the four defining inequalities; returns the first violation.
pub fn check_good_sequence(
    levels: &[ScheduleLevel],
    delta: f64,
    constants: &ScheduleConstants,
) -> Result<()> {
    let top = levels.len() - 1;
    let share = delta / (top as f64 + 1.0);
    for i in 1..=top {
        let (prev, cur) = (levels[i - 1], levels[i]);
        let fail = |what: &str| Err(Error::range(format!("level {i}: {what}")));
        if i < top {
            if 1.0 / cur.eps < constants.h3(prev.eps, share, cur.g) {
                return fail("ε_i⁻¹ < 𝓗₃");
            }
            if cur.b < constants.h4(prev.eps, share, cur.g) {
                return fail("B_i < 𝓗₄");
            }
        }
        if prev.burn_in < cur.burn_in + cur.b {
            return fail("T_b^(i−1) < T_b^(i) + B_i");
        }
        if prev.burn_in > cur.burn_in + (cur.b - prev.b) + (cur.g - prev.g) {
            return fail("T_b^(i−1) exceeds its upper bound");
        }
    }
    Ok(())
}
