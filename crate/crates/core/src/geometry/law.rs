use super::{Domain, EmpiricalMeasure, IntervalUnion};
use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-9;

/// Uniformly spread mass on `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformPiece {
    pub lo: f64,
    pub hi: f64,
    pub mass: f64,
}

/// A probability law on a one-dimensional domain made of atoms plus
/// uniform pieces (pieces may overlap). This is the exact one-step law of
/// every kernel in the crate whose target is piecewise constant.
#[derive(Debug, Clone)]
pub struct PiecewiseLaw {
    domain: Domain,
    atom_points: Vec<f64>,
    atom_cumulative: Vec<f64>,
    pieces: Vec<UniformPiece>,
}

/// Five-point Gauss–Legendre rule on `[-1, 1]`, exact for degree ≤ 9.
const GL_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

/// `∫_a^b f` for `f` polynomial of degree ≤ 9 on `[a, b]`.
pub(crate) fn gauss_legendre(a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (mid, half) = ((a + b) / 2.0, (b - a) / 2.0);
    half * GL_NODES
        .iter()
        .zip(GL_WEIGHTS)
        .map(|(t, w)| w * f(mid + half * t))
        .sum::<f64>()
}

impl PiecewiseLaw {
    /// Assemble a law; masses below zero are rejected, and the total must be
    /// one within 1e-9. Atoms are merged, zero-mass parts dropped.
    pub fn new(domain: Domain, atoms: Vec<(f64, f64)>, pieces: Vec<UniformPiece>) -> Result<Self> {
        let (a, b) = domain.bounds();
        let mut total = 0.0;
        let mut atoms: Vec<(f64, f64)> = atoms
            .into_iter()
            .map(|(x, w)| (domain.normalize(x), w))
            .collect();
        for &(x, w) in &atoms {
            if w < 0.0 || !domain.contains(x) {
                return Err(Error::InvalidMeasure(format!("bad atom ({x}, {w})")));
            }
            total += w;
        }
        for p in &pieces {
            if p.mass < 0.0 || !(p.lo < p.hi) || p.lo < a || p.hi > b {
                return Err(Error::InvalidMeasure(format!(
                    "bad piece {p:?} on {domain}"
                )));
            }
            total += p.mass;
        }
        if (total - 1.0).abs() > MASS_TOL {
            return Err(Error::InvalidMeasure(format!("law has total mass {total}")));
        }
        atoms.retain(|a| a.1 > 0.0);
        atoms.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut atom_points: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut atom_weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            if atom_points.last().is_some_and(|&l| x - l < 1e-15) {
                *atom_weights.last_mut().unwrap() += w;
            } else {
                atom_points.push(x);
                atom_weights.push(w);
            }
        }
        let mut acc = 0.0;
        let atom_cumulative = atom_weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        let pieces = pieces.into_iter().filter(|p| p.mass > 0.0).collect();
        Ok(PiecewiseLaw {
            domain,
            atom_points,
            atom_cumulative,
            pieces,
        })
    }

    pub fn point(domain: Domain, x: f64) -> Self {
        PiecewiseLaw::new(domain, vec![(x, 1.0)], vec![]).expect("point mass")
    }

    pub fn uniform(domain: Domain) -> Self {
        let (lo, hi) = domain.bounds();
        PiecewiseLaw::new(domain, vec![], vec![UniformPiece { lo, hi, mass: 1.0 }])
            .expect("uniform")
    }

    pub fn from_empirical(m: &EmpiricalMeasure) -> Self {
        PiecewiseLaw::new(m.domain(), m.atoms().collect(), vec![]).expect("empirical measure")
    }

    /// Mixture `Σ w_k law_k` with weights summing to one.
    pub fn mixture(parts: &[(f64, &PiecewiseLaw)]) -> Result<Self> {
        let domain = parts
            .first()
            .ok_or(Error::InvalidMeasure("empty mixture".into()))?
            .1
            .domain;
        let mut atoms = Vec::new();
        let mut pieces = Vec::new();
        for &(w, law) in parts {
            law.domain.check_same(&domain)?;
            atoms.extend(law.atoms().map(|(x, m)| (x, w * m)));
            pieces.extend(law.pieces.iter().map(|p| UniformPiece {
                mass: w * p.mass,
                ..*p
            }));
        }
        PiecewiseLaw::new(domain, atoms, pieces)
    }

    /// Uniform pieces for an arc `[lo, hi)` that may leave `[0, 1)` on the
    /// circle or overhang an interval (overhang mass is returned separately).
    pub fn arc_pieces(domain: Domain, lo: f64, hi: f64, mass: f64) -> (Vec<UniformPiece>, f64) {
        let density = mass / (hi - lo);
        let set = IntervalUnion::new(domain, [(lo, hi)]).expect("finite arc");
        let pieces: Vec<UniformPiece> = set
            .intervals()
            .iter()
            .map(|&(l, h)| UniformPiece {
                lo: l,
                hi: h,
                mass: density * (h - l),
            })
            .collect();
        let kept: f64 = pieces.iter().map(|p| p.mass).sum();
        let lost = if domain.is_circle() {
            0.0
        } else {
            (mass - kept).max(0.0)
        };
        (pieces, lost)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn pieces(&self) -> &[UniformPiece] {
        &self.pieces
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let mut prev = 0.0;
        self.atom_points
            .iter()
            .zip(&self.atom_cumulative)
            .map(move |(&x, &c)| {
                let w = c - prev;
                prev = c;
                (x, w)
            })
    }

    pub fn atom_count(&self) -> usize {
        self.atom_points.len()
    }

    pub fn is_atomic(&self) -> bool {
        self.pieces.is_empty()
    }

    fn piece_cdf(&self, x: f64) -> f64 {
        self.pieces
            .iter()
            .map(|p| p.mass * ((x - p.lo) / (p.hi - p.lo)).clamp(0.0, 1.0))
            .sum()
    }

    /// Mass of `(-∞, x]`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.atom_points.partition_point(|&p| p <= x);
        let atoms = if k == 0 {
            0.0
        } else {
            self.atom_cumulative[k - 1]
        };
        atoms + self.piece_cdf(x)
    }

    /// Mass of `(-∞, x)`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.atom_points.partition_point(|&p| p < x);
        let atoms = if k == 0 {
            0.0
        } else {
            self.atom_cumulative[k - 1]
        };
        atoms + self.piece_cdf(x)
    }

    /// Sorted, deduplicated CDF breakpoints including the domain ends.
    pub fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.domain.bounds();
        let mut pts: Vec<f64> = self.atom_points.clone();
        pts.extend(self.pieces.iter().flat_map(|p| [p.lo, p.hi]));
        pts.push(a);
        pts.push(b);
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// Mass of `[lo, hi)`.
    pub fn mass_between(&self, lo: f64, hi: f64) -> f64 {
        (self.cdf_left(hi) - self.cdf_left(lo)).max(0.0)
    }

    pub fn mass(&self, set: &IntervalUnion) -> f64 {
        let (_, b) = self.domain.bounds();
        set.intervals()
            .iter()
            .map(|&(lo, hi)| {
                let closed = !self.domain.is_circle() && hi == b;
                if closed {
                    (self.cdf(hi) - self.cdf_left(lo)).max(0.0)
                } else {
                    self.mass_between(lo, hi)
                }
            })
            .sum()
    }

    /// Inverse-CDF sample for a variate `u ∈ [0, 1)`.
    pub fn sample(&self, u: f64) -> f64 {
        let (a, b) = self.domain.bounds();
        let target = u.clamp(0.0, 1.0);
        let bps = self.breakpoints();
        // locate the breakpoint segment, then solve the linear CDF inside it
        let mut lo_idx = 0;
        let mut hi_idx = bps.len() - 1;
        if self.cdf(bps[0]) > target {
            return bps[0];
        }
        while hi_idx - lo_idx > 1 {
            let mid = (lo_idx + hi_idx) / 2;
            if self.cdf(bps[mid]) > target {
                hi_idx = mid;
            } else {
                lo_idx = mid;
            }
        }
        let (x0, x1) = (bps[lo_idx], bps[hi_idx]);
        let (f0, f1) = (self.cdf(x0), self.cdf_left(x1));
        if f1 > target && f1 > f0 {
            let x = x0 + (target - f0) / (f1 - f0) * (x1 - x0);
            return x.clamp(x0, x1).clamp(a, b);
        }
        // the variate falls in the atom sitting at x1
        x1
    }

    /// Expectation of `f`, exact when `f` is polynomial of degree ≤ 9
    /// between consecutive `breaks`.
    pub fn expect(&self, f: impl Fn(f64) -> f64, breaks: &[f64]) -> f64 {
        let atoms: f64 = self.atoms().map(|(x, w)| w * f(x)).sum();
        let mut total = atoms;
        for p in &self.pieces {
            let density = p.mass / (p.hi - p.lo);
            let mut cuts: Vec<f64> = breaks
                .iter()
                .copied()
                .filter(|&t| t > p.lo && t < p.hi)
                .collect();
            cuts.push(p.lo);
            cuts.push(p.hi);
            cuts.sort_by(f64::total_cmp);
            total += cuts
                .windows(2)
                .map(|w| density * gauss_legendre(w[0], w[1], &f))
                .sum::<f64>();
        }
        total
    }

    pub fn mean(&self) -> f64 {
        self.expect(|x| x, &[])
    }

    /// Closed support components as `(lo, hi)` pairs (atoms are degenerate).
    pub fn support(&self) -> Vec<(f64, f64)> {
        let mut comps: Vec<(f64, f64)> = self.atom_points.iter().map(|&x| (x, x)).collect();
        comps.extend(self.pieces.iter().map(|p| (p.lo, p.hi)));
        comps.sort_by(|p, q| p.0.total_cmp(&q.0));
        comps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lazy_ball() -> PiecewiseLaw {
        let (pieces, _) = PiecewiseLaw::arc_pieces(Domain::Circle, 0.95, 1.05, 0.5);
        PiecewiseLaw::new(Domain::Circle, vec![(0.0, 0.5)], pieces).unwrap()
    }

    #[test]
    fn arc_pieces_wrap() {
        let law = lazy_ball();
        assert_eq!(law.pieces().len(), 2);
        assert!((law.cdf(0.05) - 0.75).abs() < 1e-12);
        assert!((law.cdf_left(0.0) - 0.0).abs() < 1e-12);
        assert!((law.cdf(0.0) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn sample_inverts_cdf() {
        let law = lazy_ball();
        for k in 0..100 {
            let u = (k as f64 + 0.5) / 100.0;
            let x = law.sample(u);
            assert!(
                law.cdf_left(x) <= u + 1e-12 && law.cdf(x) >= u - 1e-12,
                "u={u} x={x}"
            );
        }
    }

    #[test]
    fn expectation_is_exact_for_polynomials() {
        let law = PiecewiseLaw::uniform(Domain::interval(-0.5, 0.5).unwrap());
        assert!((law.expect(|x| x * x, &[]) - 1.0 / 12.0).abs() < 1e-15);
        assert!(law.mean().abs() < 1e-15);
    }

    #[test]
    fn interval_arc_reports_overhang() {
        let (pieces, lost) = PiecewiseLaw::arc_pieces(Domain::UNIT_INTERVAL, -0.1, 0.1, 1.0);
        assert_eq!(pieces.len(), 1);
        assert!((lost - 0.5).abs() < 1e-12);
    }
}
