use super::{Domain, EmpiricalMeasure, IntervalUnion, PiecewiseLaw};
use crate::error::{Error, Result};

/// Right-continuous distribution function on a one-dimensional domain.
pub trait Cdf {
    fn domain(&self) -> Domain;
    /// Points where the CDF may jump or change slope, sorted.
    fn breakpoints(&self) -> Vec<f64>;
    fn cdf(&self, x: f64) -> f64;
    fn cdf_left(&self, x: f64) -> f64;
}

impl Cdf for EmpiricalMeasure {
    fn domain(&self) -> Domain {
        EmpiricalMeasure::domain(self)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.points().to_vec()
    }
    fn cdf(&self, x: f64) -> f64 {
        EmpiricalMeasure::cdf(self, x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        EmpiricalMeasure::cdf_left(self, x)
    }
}

impl Cdf for PiecewiseLaw {
    fn domain(&self) -> Domain {
        PiecewiseLaw::domain(self)
    }
    fn breakpoints(&self) -> Vec<f64> {
        PiecewiseLaw::breakpoints(self)
    }
    fn cdf(&self, x: f64) -> f64 {
        PiecewiseLaw::cdf(self, x)
    }
    fn cdf_left(&self, x: f64) -> f64 {
        PiecewiseLaw::cdf_left(self, x)
    }
}

/// `F_μ − F_ν` on `[start, end)`, linear from `h0` to `h1`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    start: f64,
    end: f64,
    h0: f64,
    h1: f64,
}

impl Segment {
    fn len(&self) -> f64 {
        self.end - self.start
    }

    /// `∫ |h − α|` over the segment.
    fn abs_integral(&self, alpha: f64) -> f64 {
        let (a, b) = (self.h0 - alpha, self.h1 - alpha);
        let len = self.len();
        if a * b >= 0.0 {
            len * (a + b).abs() / 2.0
        } else {
            // split at the zero crossing
            let t = a / (a - b);
            len * (t * a.abs() + (1.0 - t) * b.abs()) / 2.0
        }
    }

    /// Length of `{h ≤ α}` inside the segment.
    fn length_below(&self, alpha: f64) -> f64 {
        let (lo, hi) = (self.h0.min(self.h1), self.h0.max(self.h1));
        if alpha >= hi {
            self.len()
        } else if alpha < lo {
            0.0
        } else if hi == lo {
            self.len()
        } else {
            self.len() * (alpha - lo) / (hi - lo)
        }
    }
}

fn difference<A: Cdf + ?Sized, B: Cdf + ?Sized>(mu: &A, nu: &B) -> Result<Vec<Segment>> {
    let domain = mu.domain();
    domain.check_same(&nu.domain())?;
    let (lo, hi) = domain.bounds();
    let mut grid = mu.breakpoints();
    grid.extend(nu.breakpoints());
    grid.push(lo);
    grid.push(hi);
    grid.retain(|&x| x >= lo && x <= hi);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    Ok(grid
        .windows(2)
        .map(|w| Segment {
            start: w[0],
            end: w[1],
            h0: mu.cdf(w[0]) - nu.cdf(w[0]),
            h1: mu.cdf_left(w[1]) - nu.cdf_left(w[1]),
        })
        .collect())
}

/// Minimizer of `α ↦ ∫|h − α|`: the Lebesgue-weighted median of `h`.
fn median_offset(segments: &[Segment]) -> f64 {
    let total: f64 = segments.iter().map(Segment::len).sum();
    if segments.iter().all(|s| s.h0 == s.h1) {
        let mut vals: Vec<(f64, f64)> = segments.iter().map(|s| (s.h0, s.len())).collect();
        vals.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut acc = 0.0;
        for (v, w) in vals {
            acc += w;
            if acc >= total / 2.0 {
                return v;
            }
        }
        return 0.0;
    }
    let below = |alpha: f64| segments.iter().map(|s| s.length_below(alpha)).sum::<f64>();
    let mut lo = segments
        .iter()
        .map(|s| s.h0.min(s.h1))
        .fold(f64::INFINITY, f64::min);
    let mut hi = segments
        .iter()
        .map(|s| s.h0.max(s.h1))
        .fold(f64::NEG_INFINITY, f64::max);
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if below(mid) >= total / 2.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= f64::EPSILON * hi.abs().max(1.0) {
            break;
        }
    }
    hi
}

/// W1 on a common domain for any pair of CDFs: `∫|F_μ − F_ν|` on an
/// interval, `min_α ∫|F_μ − F_ν − α|` on the circle.
pub fn w1<A: Cdf + ?Sized, B: Cdf + ?Sized>(mu: &A, nu: &B) -> Result<f64> {
    let segments = difference(mu, nu)?;
    let alpha = if mu.domain().is_circle() {
        median_offset(&segments)
    } else {
        0.0
    };
    Ok(segments.iter().map(|s| s.abs_integral(alpha)).sum())
}

fn require_nonempty(m: &EmpiricalMeasure) -> Result<()> {
    if m.is_empty() {
        Err(Error::InvalidMeasure("empty measure".into()))
    } else {
        Ok(())
    }
}

/// W1 between measures on the same interval.
pub fn w1_interval(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<f64> {
    if mu.domain().is_circle() {
        return Err(Error::DomainMismatch(mu.domain(), Domain::UNIT_INTERVAL));
    }
    require_nonempty(mu)?;
    require_nonempty(nu)?;
    w1(mu, nu)
}

/// W1 between measures on the circle.
pub fn w1_circle(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<f64> {
    if !mu.domain().is_circle() {
        return Err(Error::DomainMismatch(mu.domain(), Domain::Circle));
    }
    require_nonempty(mu)?;
    require_nonempty(nu)?;
    w1(mu, nu)
}

/// W1 between mixed laws.
pub fn w1_laws(mu: &PiecewiseLaw, nu: &PiecewiseLaw) -> Result<f64> {
    w1(mu, nu)
}

const LP_TOL: f64 = 1e-9;

fn lp_holds(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, eps: f64) -> bool {
    let (lo, hi) = mu.domain().bounds();
    let slack = 1e-13;
    let check = |x: f64| {
        let left = mu.cdf(x - eps) - eps <= nu.cdf(x) + slack;
        let right = nu.cdf(x) <= mu.cdf(x + eps) + eps + slack;
        left && right
    };
    let candidates = mu
        .points()
        .iter()
        .flat_map(|&a| [a + eps, a - eps])
        .chain(nu.points().iter().copied())
        .chain([lo, hi]);
    candidates.filter(|&x| x >= lo && x <= hi).all(check)
}

/// Lévy–Prokhorov distance
/// `inf{ε : μ([0,x−ε]) − ε ≤ ν([0,x]) ≤ μ([0,x+ε]) + ε ∀x}`, by bisection
/// to absolute tolerance 1e-9.
pub fn levy_prokhorov(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure) -> Result<f64> {
    mu.domain().check_same(&nu.domain())?;
    if mu.domain().is_circle() {
        return Err(Error::DomainMismatch(mu.domain(), Domain::UNIT_INTERVAL));
    }
    require_nonempty(mu)?;
    require_nonempty(nu)?;
    if lp_holds(mu, nu, 0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, mu.domain().length().max(1.0));
    while hi - lo > LP_TOL {
        let mid = (lo + hi) / 2.0;
        if lp_holds(mu, nu, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `max(d_LP(μ, ν), |μ(G) − ν(G)|)`.
pub fn modified_lp(mu: &EmpiricalMeasure, nu: &EmpiricalMeasure, g: &IntervalUnion) -> Result<f64> {
    let lp = levy_prokhorov(mu, nu)?;
    Ok(lp.max((mu.mass(g) - nu.mass(g)).abs()))
}

/// Quantile coupling: the atom `inf{x ∈ supp ν : ν(≤ x) > F(y)}` matched to
/// a point `y` of the source law `F`.
pub fn quantile_couple(source: &PiecewiseLaw, target: &EmpiricalMeasure, y: f64) -> Result<f64> {
    require_nonempty(target)?;
    let support = source.support();
    let lo = support.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
    let hi = support
        .iter()
        .map(|c| c.1)
        .fold(f64::NEG_INFINITY, f64::max);
    if !(y >= lo && y <= hi) {
        return Err(Error::OutsideSupport { x: y, lo, hi });
    }
    let u = source.cdf(y);
    let k = target.cumulative().partition_point(|&c| c <= u);
    Ok(target.points()[k.min(target.len() - 1)])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(points: &[f64]) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(Domain::UNIT_INTERVAL, points).unwrap()
    }

    fn circ(points: &[f64]) -> EmpiricalMeasure {
        EmpiricalMeasure::uniform(Domain::Circle, points).unwrap()
    }

    #[test]
    fn interval_examples() {
        assert!((w1_interval(&unit(&[0.2]), &unit(&[0.5])).unwrap() - 0.3).abs() < 1e-15);
        let mu = unit(&[0.1, 0.4, 0.4, 0.9]);
        assert_eq!(w1_interval(&mu, &mu).unwrap(), 0.0);
        // the 2! matchings cost 0.5 and 1.0 in total; the best one averages to 0.25
        assert!(
            (w1_interval(&unit(&[0.0, 0.5]), &unit(&[0.25, 0.75])).unwrap() - 0.25).abs() < 1e-15
        );
    }

    #[test]
    fn circle_examples() {
        assert!((w1_circle(&circ(&[0.05]), &circ(&[0.95])).unwrap() - 0.1).abs() < 1e-15);
        let grid = [0.0, 0.25, 0.5, 0.75];
        let rotated: Vec<f64> = grid.iter().map(|x| x + 0.03).collect();
        assert!((w1_circle(&circ(&grid), &circ(&rotated)).unwrap() - 0.03).abs() < 1e-12);
    }

    #[test]
    fn domain_mismatch_is_an_error() {
        assert!(w1_interval(&circ(&[0.1]), &circ(&[0.2])).is_err());
        assert!(w1_circle(&unit(&[0.1]), &unit(&[0.2])).is_err());
        assert!(w1(&unit(&[0.1]), &circ(&[0.2])).is_err());
    }

    #[test]
    fn levy_prokhorov_examples() {
        let a = unit(&[0.2, 0.7]);
        assert_eq!(levy_prokhorov(&a, &a).unwrap(), 0.0);
        assert!((levy_prokhorov(&unit(&[0.2]), &unit(&[0.5])).unwrap() - 0.3).abs() < 2e-9);
    }

    #[test]
    fn modified_lp_with_whole_domain_is_lp() {
        let (a, b) = (unit(&[0.1, 0.3, 0.8]), unit(&[0.2, 0.6]));
        let full = IntervalUnion::full(Domain::UNIT_INTERVAL);
        assert_eq!(
            modified_lp(&a, &b, &full).unwrap(),
            levy_prokhorov(&a, &b).unwrap()
        );
    }

    #[test]
    fn quantile_coupling_examples() {
        let source = PiecewiseLaw::uniform(Domain::UNIT_INTERVAL);
        let target = unit(&[0.2, 0.6]);
        assert_eq!(quantile_couple(&source, &target, 0.3).unwrap(), 0.2);
        assert_eq!(quantile_couple(&source, &target, 0.7).unwrap(), 0.6);
        assert!(quantile_couple(&source, &target, 1.3).is_err());
        let atoms: Vec<f64> = (0..7).map(|k| k as f64 / 7.0 + 0.01).collect();
        let target = unit(&atoms);
        for i in 0..7 {
            let y = i as f64 / 7.0;
            assert_eq!(
                quantile_couple(&source, &target, y).unwrap(),
                target.points()[i]
            );
        }
    }

    #[test]
    fn mixed_law_against_uniform() {
        // W1(δ_{1/2}, Unif[0,1]) = 1/4 on the interval
        let d = Domain::UNIT_INTERVAL;
        let w = w1_laws(&PiecewiseLaw::point(d, 0.5), &PiecewiseLaw::uniform(d)).unwrap();
        assert!((w - 0.25).abs() < 1e-15);
        // on the circle the uniform law is rotation invariant: W1(δ_x, λ) = 1/4
        let c = Domain::Circle;
        let w = w1_laws(&PiecewiseLaw::point(c, 0.3), &PiecewiseLaw::uniform(c)).unwrap();
        assert!((w - 0.25).abs() < 1e-12, "{w}");
    }
}
