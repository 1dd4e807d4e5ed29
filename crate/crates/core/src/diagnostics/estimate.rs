use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::kernel::Kernel;
use crate::error::{Error, Result};
use crate::geometry::{gauss_legendre, w1, Domain, EmpiricalMeasure, Observable, PiecewiseLaw};
use crate::targets::PiecewiseDensity;

/// Draws per point for sampled Wasserstein estimates.
pub const DEFAULT_SAMPLES: usize = 2048;
/// Grid size for sup-over-`x` estimates.
pub const DEFAULT_GRID: usize = 128;
const BOOTSTRAP: usize = 32;

/// A value with its standard error (zero when computed exactly).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Estimate { value, se: 0.0 }
    }

    pub fn is_exact(&self) -> bool {
        self.se == 0.0
    }
}

impl fmt::Display for Estimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.value)
        } else {
            write!(f, "{} ± {}", self.value, self.se)
        }
    }
}

/// Cell midpoints of an `n`-cell uniform grid.
pub fn uniform_grid(domain: Domain, n: usize) -> Vec<f64> {
    let (a, b) = domain.bounds();
    let h = (b - a) / n as f64;
    (0..n).map(|k| a + h * (k as f64 + 0.5)).collect()
}

fn sample_sd(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

/// One side of a W1 comparison: an exact law or a sample.
enum Side {
    Law(PiecewiseLaw),
    Sample(Vec<f64>),
}

impl Side {
    fn of(k: &dyn Kernel, x: f64, n: usize, rng: &mut dyn RngCore) -> Result<Self> {
        match k.law(x) {
            Ok(law) => Ok(Side::Law(law)),
            Err(Error::NoExactLaw) => Ok(Side::Sample((0..n).map(|_| k.sample(x, rng)).collect())),
            Err(e) => Err(e),
        }
    }

    fn resample(&self, rng: &mut dyn RngCore) -> Side {
        match self {
            Side::Law(l) => Side::Law(l.clone()),
            Side::Sample(xs) => Side::Sample(
                (0..xs.len())
                    .map(|_| xs[rng.random_range(0..xs.len())])
                    .collect(),
            ),
        }
    }
}

fn side_w1(domain: Domain, a: &Side, b: &Side) -> Result<f64> {
    let emp = |xs: &[f64]| EmpiricalMeasure::uniform(domain, xs);
    match (a, b) {
        (Side::Law(p), Side::Law(q)) => w1(p, q),
        (Side::Law(p), Side::Sample(ys)) => w1(p, &emp(ys)?),
        (Side::Sample(xs), Side::Law(q)) => w1(&emp(xs)?, q),
        (Side::Sample(xs), Side::Sample(ys)) => w1(&emp(xs)?, &emp(ys)?),
    }
}

/// `W1(K1(x1, ·), K2(x2, ·))`: exact when both kernels expose laws,
/// otherwise from `n` draws per sampled side with a bootstrap standard error.
pub fn kernel_w1(
    k1: &dyn Kernel,
    x1: f64,
    k2: &dyn Kernel,
    x2: f64,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<Estimate> {
    k1.domain().check_same(&k2.domain())?;
    let domain = k1.domain();
    if n < 2 {
        return Err(Error::TooFewSamples(format!("{n} draws per point")));
    }
    let a = Side::of(k1, x1, n, rng)?;
    let b = Side::of(k2, x2, n, rng)?;
    let value = side_w1(domain, &a, &b)?;
    if matches!((&a, &b), (Side::Law(_), Side::Law(_))) {
        return Ok(Estimate::exact(value));
    }
    let boots = (0..BOOTSTRAP)
        .map(|_| side_w1(domain, &a.resample(rng), &b.resample(rng)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(Estimate {
        value,
        se: sample_sd(&boots),
    })
}

/// Ollivier curvature `1 − W1(A(x, ·), B(y, ·))/d(x, y)`.
pub fn curvature(
    a: &dyn Kernel,
    b: &dyn Kernel,
    x: f64,
    y: f64,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<Estimate> {
    let d = a.domain().dist(x, y);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    let w = kernel_w1(a, x, b, y, n, rng)?;
    Ok(Estimate {
        value: 1.0 - w.value / d,
        se: w.se / d,
    })
}

/// Smallest curvature over the given pairs, with the minimizing pair.
pub fn global_curvature(
    k: &dyn Kernel,
    pairs: &[(f64, f64)],
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<(Estimate, (f64, f64))> {
    let mut best: Option<(Estimate, (f64, f64))> = None;
    for &(x, y) in pairs {
        let e = curvature(k, k, x, y, n, rng)?;
        if best.is_none_or(|b| e.value < b.0.value) {
            best = Some((e, (x, y)));
        }
    }
    best.ok_or_else(|| Error::TooFewSamples("no point pairs".into()))
}

#[derive(Debug, Clone)]
pub struct KernelDistance {
    pub per_point: Vec<(f64, Estimate)>,
    /// Largest grid value.
    pub max: Estimate,
    pub at: f64,
    /// `max + 𝒞·h`, an upper bound on the sup over the whole domain when
    /// both kernels are `𝒞`-Lipschitz in W1 and the grid has spacing `h`.
    pub certified: f64,
}

/// `max_x W1(K1(x, ·), K2(x, ·))` over `grid`. Grid points run in parallel,
/// each on its own stream derived from `seed`.
pub fn kernel_distance(
    k1: &dyn Kernel,
    k2: &dyn Kernel,
    grid: &[f64],
    n: usize,
    lipschitz: f64,
    seed: u64,
) -> Result<KernelDistance> {
    k1.domain().check_same(&k2.domain())?;
    if grid.is_empty() {
        return Err(Error::TooFewSamples("empty grid".into()));
    }
    let per_point = grid
        .par_iter()
        .enumerate()
        .map(|(k, &x)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(k as u64);
            Ok((x, kernel_w1(k1, x, k2, x, n, &mut rng)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let &(at, max) = per_point
        .iter()
        .max_by(|p, q| p.1.value.total_cmp(&q.1.value))
        .expect("nonempty grid");
    let certified = max.value + lipschitz * covering_spacing(k1.domain(), grid);
    Ok(KernelDistance {
        per_point,
        max,
        at,
        certified,
    })
}

/// Twice the covering radius of a grid: every point lies within half this
/// of a grid point.
fn covering_spacing(domain: Domain, grid: &[f64]) -> f64 {
    let (a, b) = domain.bounds();
    let mut pts: Vec<f64> = grid.iter().map(|&x| domain.normalize(x)).collect();
    pts.sort_by(f64::total_cmp);
    let inner = pts.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    let ends = if domain.is_circle() {
        first + 1.0 - last
    } else {
        2.0 * (first - a).max(b - last)
    };
    inner.max(ends)
}

/// `∫ d(x, y) π(dy)`.
pub fn eccentricity(x: f64, pi: &PiecewiseDensity) -> f64 {
    pi.expected_distance(x)
}

/// Support components of a law: `(lo, hi, mass)` with `lo == hi` for atoms.
fn components(law: &PiecewiseLaw) -> Vec<(f64, f64, f64)> {
    law.atoms()
        .map(|(x, w)| (x, x, w))
        .chain(law.pieces().iter().map(|p| (p.lo, p.hi, p.mass)))
        .collect()
}

/// `E g(Y − Z)` for independent `Y` in `[a0, a1]`, `Z` in `[b0, b1]`, each
/// uniform (or a point when degenerate), where `g` is a polynomial of degree
/// at most 6 between consecutive `kinks`.
fn difference_expectation(
    a: (f64, f64),
    b: (f64, f64),
    g: &dyn Fn(f64) -> f64,
    kinks: &dyn Fn(f64, f64) -> Vec<f64>,
) -> f64 {
    let (la, lb) = (a.1 - a.0, b.1 - b.0);
    let (lo, hi) = (a.0 - b.1, a.1 - b.0);
    if hi <= lo {
        return g(lo);
    }
    let weight: Box<dyn Fn(f64) -> f64> = if la > 0.0 && lb > 0.0 {
        Box::new(move |u: f64| ((a.1.min(b.1 + u) - a.0.max(b.0 + u)).max(0.0)) / (la * lb))
    } else {
        Box::new(move |_| 1.0 / (hi - lo))
    };
    let mut cuts = vec![lo, hi, a.0 - b.0, a.1 - b.1];
    cuts.extend(kinks(lo, hi));
    cuts.retain(|&u| u >= lo && u <= hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|w| gauss_legendre(w[0], w[1], |u| weight(u) * g(u)))
        .sum()
}

/// `E d(Y, Z)²` for `Y, Z` independent draws from `law`.
pub fn mean_square_distance(law: &PiecewiseLaw) -> f64 {
    let circle = law.domain().is_circle();
    let g = move |u: f64| {
        let d = if circle {
            (u - u.round()).abs()
        } else {
            u.abs()
        };
        d * d
    };
    let kinks = move |lo: f64, hi: f64| -> Vec<f64> {
        if circle {
            let first = (2.0 * lo).ceil() as i64;
            let last = (2.0 * hi).floor() as i64;
            (first..=last).map(|k| k as f64 / 2.0).collect()
        } else {
            vec![0.0]
        }
    };
    let comps = components(law);
    let mut total = 0.0;
    for &(a0, a1, wa) in &comps {
        for &(b0, b1, wb) in &comps {
            total += wa * wb * difference_expectation((a0, a1), (b0, b1), &g, &kinks);
        }
    }
    total
}

/// Coarse diffusion `σ²(x) = ½ ∬ d(y, z)² K(x, dy) K(x, dz)`: exact from the
/// law when available, otherwise from `n` independent pairs.
pub fn coarse_diffusion(
    k: &dyn Kernel,
    x: f64,
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<Estimate> {
    match k.law(x) {
        Ok(law) => Ok(Estimate::exact(mean_square_distance(&law) / 2.0)),
        Err(Error::NoExactLaw) => {
            if n < 2 {
                return Err(Error::TooFewSamples(format!("{n} pairs")));
            }
            let domain = k.domain();
            let halves: Vec<f64> = (0..n)
                .map(|_| {
                    let (y, z) = (k.sample(x, rng), k.sample(x, rng));
                    domain.dist(y, z).powi(2) / 2.0
                })
                .collect();
            let mean = halves.iter().sum::<f64>() / n as f64;
            Ok(Estimate {
                value: mean,
                se: sample_sd(&halves) / (n as f64).sqrt(),
            })
        }
        Err(e) => Err(e),
    }
}

/// Largest distance between points of the closed components.
fn support_diameter(domain: Domain, comps: &[(f64, f64)]) -> f64 {
    if !domain.is_circle() {
        let lo = comps.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let hi = comps.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
        return hi - lo;
    }
    let tent = |u: f64| (u - u.round()).abs();
    let mut best: f64 = 0.0;
    for &(a0, a1) in comps {
        for &(b0, b1) in comps {
            // differences sweep [a0 − b1, a1 − b0]; the tent peaks at half-integers
            let (lo, hi) = (a0 - b1, a1 - b0);
            let peak = (lo - 0.5).ceil() + 0.5;
            let d = if peak <= hi {
                0.5
            } else {
                tent(lo).max(tent(hi))
            };
            best = best.max(d);
        }
    }
    best
}

/// Granularity `σ_∞ = ½ sup_x diam Supp K(x, ·)`, the sup taken over `grid`.
pub fn granularity(k: &dyn Kernel, grid: &[f64]) -> Result<f64> {
    let domain = k.domain();
    let mut best: f64 = 0.0;
    for &x in grid {
        let law = k.law(x)?;
        best = best.max(support_diameter(domain, &law.support()));
    }
    Ok(best / 2.0)
}

/// The default local-dimension dictionary at `x`: the two arc-length charts
/// through `x` (the centered coordinate on an interval) plus eight random
/// 1-Lipschitz piecewise-linear functions.
pub fn default_dictionary(domain: Domain, x: f64, seed: u64) -> Vec<Observable> {
    let mut dict = if domain.is_circle() {
        vec![
            Observable::DistanceTo(x - 0.25),
            Observable::DistanceTo(x + 0.25),
        ]
    } else {
        vec![Observable::Centered]
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (a, b) = domain.bounds();
    let knots = 8;
    let h = (b - a) / knots as f64;
    for _ in 0..8 {
        let mut slopes: Vec<f64> = (0..knots).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if domain.is_circle() {
            let mean = slopes.iter().sum::<f64>() / knots as f64;
            slopes.iter_mut().for_each(|s| *s -= mean);
            let top = slopes.iter().fold(1.0f64, |m, s| m.max(s.abs()));
            slopes.iter_mut().for_each(|s| *s /= top);
        }
        let mut y = 0.0;
        let mut pts = vec![(a, 0.0)];
        for (k, s) in slopes.iter().enumerate() {
            y += s * h;
            pts.push((a + h * (k + 1) as f64, y));
        }
        dict.push(Observable::PiecewiseLinear(pts));
    }
    dict
}

/// Upper bound on the local dimension
/// `n(x) = inf_f ∬ d(y, z)² KK / ∬ |f(y) − f(z)|² KK` over 1-Lipschitz
/// `f` in `dictionary`. Exact integrals from the law when available,
/// otherwise `n` shared sample pairs (which keeps the ratio at least one).
pub fn local_dimension(
    k: &dyn Kernel,
    x: f64,
    dictionary: &[Observable],
    n: usize,
    rng: &mut dyn RngCore,
) -> Result<f64> {
    let domain = k.domain();
    if dictionary.is_empty() {
        return Err(Error::config("empty test-function dictionary"));
    }
    for f in dictionary {
        f.certify(domain)?;
    }
    let (numerator, spreads): (f64, Vec<f64>) = match k.law(x) {
        Ok(law) => {
            let spreads = dictionary
                .iter()
                .map(|f| {
                    let breaks = f.breakpoints(domain);
                    let m1 = law.expect(|y| f.eval(domain, y), &breaks);
                    let m2 = law.expect(|y| f.eval(domain, y).powi(2), &breaks);
                    2.0 * (m2 - m1 * m1)
                })
                .collect();
            (mean_square_distance(&law), spreads)
        }
        Err(Error::NoExactLaw) => {
            let pairs: Vec<(f64, f64)> = (0..n)
                .map(|_| (k.sample(x, rng), k.sample(x, rng)))
                .collect();
            let num = pairs.iter().map(|&(y, z)| domain.dist(y, z).powi(2)).sum();
            let spreads = dictionary
                .iter()
                .map(|f| {
                    pairs
                        .iter()
                        .map(|&(y, z)| (f.eval(domain, y) - f.eval(domain, z)).powi(2))
                        .sum()
                })
                .collect();
            (num, spreads)
        }
        Err(e) => return Err(e),
    };
    let floor = 1e-14 * numerator.max(f64::MIN_POSITIVE);
    spreads
        .into_iter()
        .filter(|&s| s > floor)
        .map(|s| numerator / s)
        .min_by(f64::total_cmp)
        .ok_or(Error::DegenerateTestFunction)
}
