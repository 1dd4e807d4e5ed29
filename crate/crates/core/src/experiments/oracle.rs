/// Exact moments of the two-level uniform example: both levels target the
/// uniform law, the proposal is independent and there is one ring, so every
/// equi-energy jump is accepted and lands on a uniformly chosen past state
/// of level 1. The move producing `X_b` sees the `b` level-1 states
/// `0, …, b − 1`; the start at `T_b` sees `0, …, T_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformExample {
    pub p_ee: f64,
    pub t_b: usize,
    /// `Var f` under the uniform law (`1/12` for `f(x) = x` on `[−1/2, 1/2]`).
    pub second_moment: f64,
}

impl UniformExample {
    pub fn new(p_ee: f64, t_b: usize, second_moment: f64) -> Self {
        UniformExample {
            p_ee,
            t_b,
            second_moment,
        }
    }

    /// `E[f(X_a) f(X_b)]` for `T_b ≤ a ≤ b`. Two jumps pick the same
    /// history index with probability `1/b`, since the indices seen at `a`
    /// are a subset of those seen at `b`.
    pub fn cross_moment(&self, a: usize, b: usize) -> f64 {
        assert!(self.t_b <= a && a <= b, "need T_b ≤ a ≤ b");
        if a == b {
            self.second_moment
        } else {
            self.p_ee * self.p_ee * self.second_moment / b as f64
        }
    }

    /// `Var π̂_{T,T_b}(f) = (1/T²)[Tσ² + 2p²σ² Σ_{t} (t − T_b − 1)/t]`.
    pub fn variance(&self, t: usize) -> f64 {
        let tf = t as f64;
        let pairs: f64 = (self.t_b + 1..=self.t_b + t)
            .map(|s| (s - self.t_b - 1) as f64 / s as f64)
            .sum();
        (tf * self.second_moment + 2.0 * self.p_ee * self.p_ee * self.second_moment * pairs)
            / (tf * tf)
    }

    /// `lim T·Var = σ²(1 + 2p²)`.
    pub fn limit_constant(&self) -> f64 {
        self.second_moment * (1.0 + 2.0 * self.p_ee * self.p_ee)
    }

    /// The printed leading constant `(1 + 2p²)/6`.
    pub fn printed_constant(&self) -> f64 {
        (1.0 + 2.0 * self.p_ee * self.p_ee) / 6.0
    }

    /// The printed covariance `p²/(6(T + S + 1))`.
    pub fn printed_cross_moment(&self, t: usize, s: usize) -> f64 {
        self.p_ee * self.p_ee / (6.0 * (t + s + 1) as f64)
    }

    /// `Σ_{S=1}^{S_max} E[f(X_T) f(X_{T+S})]`, which grows like `log S_max`.
    pub fn partial_sum(&self, t: usize, s_max: usize) -> f64 {
        (1..=s_max).map(|s| self.cross_moment(t, t + s)).sum()
    }
}
