use super::{Domain, IntervalUnion};
use crate::error::{Error, Result};

const MERGE_GAP: f64 = 1e-15;
const WEIGHT_TOL: f64 = 1e-12;

/// A finitely supported probability measure: sorted atoms with positive
/// weights summing to one. Atoms closer than `1e-15` are merged.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    domain: Domain,
    points: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl EmpiricalMeasure {
    /// The measure with no atoms; only ring lookups produce it.
    pub fn empty(domain: Domain) -> Self {
        EmpiricalMeasure {
            domain,
            points: vec![],
            weights: vec![],
            cumulative: vec![],
        }
    }

    /// Weighted atoms. Weights must be positive and sum to one within 1e-12.
    pub fn new(domain: Domain, atoms: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut atoms: Vec<(f64, f64)> = atoms
            .into_iter()
            .map(|(x, w)| (domain.normalize(x), w))
            .collect();
        for &(x, w) in &atoms {
            if !domain.contains(x) {
                return Err(Error::InvalidMeasure(format!("atom {x} outside {domain}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(Error::InvalidMeasure(format!(
                    "non-positive weight {w} at {x}"
                )));
            }
        }
        let total: f64 = atoms.iter().map(|a| a.1).sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidMeasure(format!("weights sum to {total}")));
        }
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut points: Vec<f64> = Vec::with_capacity(atoms.len());
        let mut weights: Vec<f64> = Vec::with_capacity(atoms.len());
        for (x, w) in atoms {
            match points.last() {
                Some(&last) if x - last < MERGE_GAP => *weights.last_mut().unwrap() += w,
                _ => {
                    points.push(x);
                    weights.push(w);
                }
            }
        }
        let mut acc = 0.0;
        let cumulative = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        Ok(EmpiricalMeasure {
            domain,
            points,
            weights,
            cumulative,
        })
    }

    /// Equal weights on the given points (with multiplicity). Cumulative
    /// masses are exact multiples of `1/n`.
    pub fn uniform(domain: Domain, points: &[f64]) -> Result<Self> {
        if points.is_empty() {
            return Ok(Self::empty(domain));
        }
        let n = points.len();
        let mut sorted: Vec<f64> = points.iter().map(|&x| domain.normalize(x)).collect();
        if let Some(&x) = sorted.iter().find(|&&x| !domain.contains(x)) {
            return Err(Error::InvalidMeasure(format!("atom {x} outside {domain}")));
        }
        sorted.sort_by(f64::total_cmp);
        let mut out = EmpiricalMeasure::empty(domain);
        let mut count = 0usize;
        for (k, &x) in sorted.iter().enumerate() {
            let merge = matches!(out.points.last(), Some(&last) if x - last < MERGE_GAP);
            if !merge {
                out.points.push(x);
                out.weights.push(0.0);
                out.cumulative.push(0.0);
            }
            count = k + 1;
            *out.weights.last_mut().unwrap() += 1.0 / n as f64;
            *out.cumulative.last_mut().unwrap() = count as f64 / n as f64;
        }
        debug_assert_eq!(count, n);
        Ok(out)
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn atoms(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.points
            .iter()
            .copied()
            .zip(self.weights.iter().copied())
    }

    /// Cumulative masses aligned with [`points`](Self::points).
    pub fn cumulative(&self) -> &[f64] {
        &self.cumulative
    }

    /// Mass of atoms `<= x`.
    pub fn cdf(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|&p| p <= x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    /// Mass of atoms `< x`.
    pub fn cdf_left(&self, x: f64) -> f64 {
        let k = self.points.partition_point(|&p| p < x);
        if k == 0 {
            0.0
        } else {
            self.cumulative[k - 1]
        }
    }

    pub fn mass(&self, set: &IntervalUnion) -> f64 {
        self.atoms()
            .filter(|&(x, _)| set.contains(x))
            .map(|(_, w)| w)
            .sum()
    }

    pub fn mean(&self) -> f64 {
        self.atoms().map(|(x, w)| x * w).sum()
    }
}
