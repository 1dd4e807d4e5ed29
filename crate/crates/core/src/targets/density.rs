use crate::error::{Error, Result};
use crate::geometry::{Domain, IntervalUnion, PiecewiseLaw, UniformPiece};

/// `exp(log_start + slope·(x − lo))` on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpPiece {
    pub lo: f64,
    pub hi: f64,
    pub log_start: f64,
    pub slope: f64,
}

impl ExpPiece {
    fn log_at(&self, x: f64) -> f64 {
        self.log_start + self.slope * (x - self.lo)
    }

    /// `(∫_a^b ρ, ∫_a^b (y − a) ρ(y) dy)` for `lo ≤ a ≤ b ≤ hi`.
    fn moments(&self, a: f64, b: f64) -> (f64, f64) {
        let len = b - a;
        if len <= 0.0 {
            return (0.0, 0.0);
        }
        let z = self.slope * len;
        let scale = self.log_at(a).exp();
        (scale * len * phi1(z), scale * len * len * phi2(z))
    }

    /// Offset `t` with `∫_a^{a+t} ρ = m`.
    fn invert(&self, a: f64, m: f64) -> f64 {
        let w = m * (-self.log_at(a)).exp();
        if self.slope == 0.0 {
            w
        } else {
            (self.slope * w).ln_1p() / self.slope
        }
    }
}

/// `(e^z − 1)/z`.
fn phi1(z: f64) -> f64 {
    if z.abs() < 1e-3 {
        1.0 + z / 2.0 * (1.0 + z / 3.0 * (1.0 + z / 4.0 * (1.0 + z / 5.0)))
    } else {
        z.exp_m1() / z
    }
}

/// `∫_0^1 t e^{zt} dt`.
fn phi2(z: f64) -> f64 {
    if z.abs() < 0.5 {
        // Σ z^k / (k! (k + 2))
        let mut term = 1.0;
        let mut sum = 0.5;
        for k in 1..18 {
            term *= z / k as f64;
            sum += term / (k + 2) as f64;
        }
        sum
    } else {
        (z.exp() * (z - 1.0) + 1.0) / (z * z)
    }
}

/// A density on a one-dimensional domain, exactly log-linear on each piece.
/// Masses, CDFs, moments and inverse CDFs are closed-form.
#[derive(Debug, Clone)]
pub struct PiecewiseDensity {
    domain: Domain,
    pieces: Vec<ExpPiece>,
    /// Unnormalized mass of pieces `0..=k`.
    cumulative: Vec<f64>,
}

/// Segments of a density restricted to a set, ready for repeated sampling.
#[derive(Debug, Clone)]
pub struct Restriction {
    segments: Vec<(ExpPiece, f64, f64)>,
    cumulative: Vec<f64>,
}

impl Restriction {
    /// Unnormalized mass of the restriction.
    pub fn mass(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Inverse-CDF draw from the normalized restriction.
    pub fn sample(&self, u: f64) -> f64 {
        let target = u * self.mass();
        let k = self
            .cumulative
            .partition_point(|&c| c <= target)
            .min(self.segments.len() - 1);
        let before = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        let (piece, a, b) = self.segments[k];
        (a + piece.invert(a, target - before)).clamp(a, prev_float(b).max(a))
    }
}

fn prev_float(x: f64) -> f64 {
    if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else if x == 0.0 {
        -f64::from_bits(1)
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

impl PiecewiseDensity {
    /// Pieces must be contiguous and tile the domain exactly.
    pub fn new(domain: Domain, pieces: Vec<ExpPiece>) -> Result<Self> {
        let (a, b) = domain.bounds();
        let tiles = !pieces.is_empty()
            && pieces[0].lo == a
            && pieces.last().is_some_and(|p| p.hi == b)
            && pieces.windows(2).all(|w| w[0].hi == w[1].lo)
            && pieces.iter().all(|p| p.lo < p.hi);
        if !tiles {
            return Err(Error::InvalidMeasure(
                "density pieces must tile the domain".into(),
            ));
        }
        if pieces
            .iter()
            .any(|p| !p.log_start.is_finite() || !p.slope.is_finite())
        {
            return Err(Error::InvalidMeasure("non-finite density piece".into()));
        }
        let cumulative = pieces
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p.moments(p.lo, p.hi).0;
                Some(*acc)
            })
            .collect::<Vec<_>>();
        if !(cumulative.last().copied().unwrap_or(0.0) > 0.0) {
            return Err(Error::ZeroMass);
        }
        Ok(PiecewiseDensity {
            domain,
            pieces,
            cumulative,
        })
    }

    pub fn uniform(domain: Domain) -> Self {
        let (lo, hi) = domain.bounds();
        Self::new(
            domain,
            vec![ExpPiece {
                lo,
                hi,
                log_start: 0.0,
                slope: 0.0,
            }],
        )
        .expect("a flat piece over the domain is valid")
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn pieces(&self) -> &[ExpPiece] {
        &self.pieces
    }

    /// Normalizing constant `Z`.
    pub fn total(&self) -> f64 {
        *self.cumulative.last().expect("nonempty")
    }

    fn piece_index(&self, x: f64) -> usize {
        self.pieces
            .partition_point(|p| p.hi <= x)
            .min(self.pieces.len() - 1)
    }

    pub fn log_unnormalized(&self, x: f64) -> f64 {
        let x = self.domain.normalize(x);
        self.pieces[self.piece_index(x)].log_at(x)
    }

    pub fn unnormalized(&self, x: f64) -> f64 {
        self.log_unnormalized(x).exp()
    }

    pub fn density(&self, x: f64) -> f64 {
        self.unnormalized(x) / self.total()
    }

    fn unnormalized_cdf(&self, x: f64) -> f64 {
        let (a, b) = self.domain.bounds();
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return self.total();
        }
        let k = self.piece_index(x);
        let before = if k == 0 { 0.0 } else { self.cumulative[k - 1] };
        let p = &self.pieces[k];
        before + p.moments(p.lo, x).0
    }

    /// Normalized `P[X ≤ x]` in domain coordinates.
    pub fn cdf(&self, x: f64) -> f64 {
        self.unnormalized_cdf(x) / self.total()
    }

    /// Normalized mass of `[lo, hi)` in domain coordinates, `lo ≤ hi`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        ((self.unnormalized_cdf(hi) - self.unnormalized_cdf(lo)) / self.total()).max(0.0)
    }

    pub fn mass(&self, set: &IntervalUnion) -> f64 {
        set.intervals()
            .iter()
            .map(|&(lo, hi)| self.mass_between(lo, hi))
            .sum()
    }

    /// Masses of `n` equal cells tiling the domain.
    pub fn cell_masses(&self, n: usize) -> Vec<f64> {
        let (a, b) = self.domain.bounds();
        let h = (b - a) / n as f64;
        let edges: Vec<f64> = (0..=n)
            .map(|k| if k == n { b } else { a + h * k as f64 })
            .collect();
        let cdf: Vec<f64> = edges.iter().map(|&x| self.unnormalized_cdf(x)).collect();
        let z = self.total();
        cdf.windows(2).map(|w| (w[1] - w[0]).max(0.0) / z).collect()
    }

    /// Exact inverse-CDF sample.
    pub fn sample(&self, u: f64) -> f64 {
        self.restrict(&IntervalUnion::full(self.domain))
            .expect("full domain carries the whole mass")
            .sample(u)
    }

    /// Precompute the restriction to `set` for repeated sampling.
    pub fn restrict(&self, set: &IntervalUnion) -> Result<Restriction> {
        set.domain().check_same(&self.domain)?;
        let mut segments = Vec::new();
        let mut cumulative = Vec::new();
        let mut acc = 0.0;
        for &(lo, hi) in set.intervals() {
            let start = self.pieces.partition_point(|p| p.hi <= lo);
            for p in self.pieces[start..].iter().take_while(|p| p.lo < hi) {
                let (a, b) = (lo.max(p.lo), hi.min(p.hi));
                let m = p.moments(a, b).0;
                if m > 0.0 {
                    acc += m;
                    segments.push((*p, a, b));
                    cumulative.push(acc);
                }
            }
        }
        if segments.is_empty() {
            return Err(Error::ZeroMass);
        }
        Ok(Restriction {
            segments,
            cumulative,
        })
    }

    /// Exact inverse-CDF sample from the density conditioned on `set`.
    pub fn sample_restricted(&self, set: &IntervalUnion, u: f64) -> Result<f64> {
        Ok(self.restrict(set)?.sample(u))
    }

    /// Normalized `∫ f` for `f` affine on each `[breaks[k], breaks[k+1])`,
    /// given by its value at the left break and its slope there.
    fn integrate_affine(&self, segments: &[(f64, f64, f64, f64)]) -> f64 {
        let mut total = 0.0;
        for &(lo, hi, f_lo, slope) in segments {
            let start = self.pieces.partition_point(|p| p.hi <= lo);
            for p in self.pieces[start..].iter().take_while(|p| p.lo < hi) {
                let (a, b) = (lo.max(p.lo), hi.min(p.hi));
                let (m0, m1) = p.moments(a, b);
                total += (f_lo + slope * (a - lo)) * m0 + slope * m1;
            }
        }
        total / self.total()
    }

    pub fn mean(&self) -> f64 {
        let (a, b) = self.domain.bounds();
        self.integrate_affine(&[(a, b, a, 1.0)])
    }

    /// `∫ d(x, y) π(dy)`, exact.
    pub fn expected_distance(&self, x: f64) -> f64 {
        let (a, b) = self.domain.bounds();
        let x = self.domain.normalize(x);
        let mut breaks = vec![a, x, b];
        if self.domain.is_circle() {
            breaks.extend([x - 0.5, x + 0.5].into_iter().filter(|&y| y > a && y < b));
        }
        breaks.sort_by(f64::total_cmp);
        breaks.dedup();
        let segments: Vec<_> = breaks
            .windows(2)
            .filter(|w| w[0] < w[1])
            .map(|w| {
                let (d0, d1) = (self.domain.dist(x, w[0]), self.domain.dist(x, w[1]));
                (w[0], w[1], d0, if d1 >= d0 { 1.0 } else { -1.0 })
            })
            .collect();
        self.integrate_affine(&segments)
    }

    /// Piecewise-uniform law with the same cell masses; exact for flat
    /// pieces, otherwise sloped pieces are split into cells of width at most
    /// `max_cell`, which bounds the W1 error by `max_cell`.
    pub fn to_law(&self, max_cell: f64) -> Result<PiecewiseLaw> {
        let z = self.total();
        let mut out = Vec::new();
        for p in &self.pieces {
            let cells = if p.slope == 0.0 {
                1
            } else {
                ((p.hi - p.lo) / max_cell).ceil().max(1.0) as usize
            };
            let h = (p.hi - p.lo) / cells as f64;
            for k in 0..cells {
                let lo = p.lo + h * k as f64;
                let hi = if k + 1 == cells { p.hi } else { lo + h };
                out.push(UniformPiece {
                    lo,
                    hi,
                    mass: p.moments(lo, hi).0 / z,
                });
            }
        }
        PiecewiseLaw::new(self.domain, vec![], out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::gauss_legendre;

    fn tilted() -> PiecewiseDensity {
        PiecewiseDensity::new(
            Domain::Circle,
            vec![
                ExpPiece {
                    lo: 0.0,
                    hi: 0.25,
                    log_start: 0.0,
                    slope: -8.0,
                },
                ExpPiece {
                    lo: 0.25,
                    hi: 0.5,
                    log_start: -2.0,
                    slope: 8.0,
                },
                ExpPiece {
                    lo: 0.5,
                    hi: 1.0,
                    log_start: 0.0,
                    slope: 1e-7,
                },
            ],
        )
        .unwrap()
    }

    fn quad(d: &PiecewiseDensity, f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> f64 {
        let n = 4000;
        let h = (hi - lo) / n as f64;
        (0..n)
            .map(|k| {
                let a = lo + h * k as f64;
                gauss_legendre(a, a + h, |x| f(x) * d.density(x))
            })
            .sum()
    }

    #[test]
    fn integrates_to_one() {
        let d = tilted();
        assert!((quad(&d, |_| 1.0, 0.0, 1.0) - 1.0).abs() < 1e-12);
        assert!((d.cdf(1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn moments_match_quadrature() {
        let d = tilted();
        assert!((d.mean() - quad(&d, |x| x, 0.0, 1.0)).abs() < 1e-12);
        for x in [0.0, 0.13, 0.5, 0.77] {
            let e = quad(&d, |y| Domain::Circle.dist(x, y), 0.0, 1.0);
            assert!((d.expected_distance(x) - e).abs() < 1e-9, "{x}");
        }
    }

    #[test]
    fn uniform_circle_eccentricity() {
        let d = PiecewiseDensity::uniform(Domain::Circle);
        for x in [0.0, 0.3, 0.99] {
            assert!((d.expected_distance(x) - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn inverse_cdf_round_trip() {
        let d = tilted();
        for k in 0..=100 {
            let u = k as f64 / 100.0;
            let x = d.sample(u);
            assert!((d.cdf(x) - u).abs() < 1e-12, "{u} {x}");
        }
    }

    #[test]
    fn flat_restrictions() {
        let d = PiecewiseDensity::uniform(Domain::UNIT_INTERVAL);
        let one = IntervalUnion::new(Domain::UNIT_INTERVAL, [(0.2, 0.6)]).unwrap();
        assert!((d.sample_restricted(&one, 0.25).unwrap() - 0.3).abs() < 1e-15);
        let two = IntervalUnion::new(Domain::UNIT_INTERVAL, [(0.0, 0.1), (0.5, 0.6)]).unwrap();
        assert!(d.sample_restricted(&two, 0.49).unwrap() < 0.1);
        assert!(d.sample_restricted(&two, 0.51).unwrap() >= 0.5);
        let none = IntervalUnion::empty(Domain::UNIT_INTERVAL);
        assert!(matches!(
            d.sample_restricted(&none, 0.5),
            Err(Error::ZeroMass)
        ));
    }

    #[test]
    fn law_matches_density_cells() {
        let d = tilted();
        let law = d.to_law(1e-3).unwrap();
        for x in [0.1, 0.25, 0.4, 0.9] {
            assert!((law.cdf(x) - d.cdf(x)).abs() < 1e-3);
        }
        let cells = d.cell_masses(8);
        assert!((cells.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
