use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::geometry::{Domain, IntervalUnion};
use crate::targets::{EnergyRingSpec, PiecewiseDensity, TemperedFamily};

/// Default number of cells.
pub const DEFAULT_CELLS: usize = 512;
const ROW_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;
const BALANCE_TOL: f64 = 1e-12;

/// A Markov chain on the `n` equal cells of a domain, each cell represented
/// by its midpoint.
#[derive(Debug, Clone)]
pub struct DiscretizedChain {
    domain: Domain,
    matrix: DMatrix<f64>,
    stationary: Vec<f64>,
}

/// `∫_{s1}^{s2} (h − |s|) ds` through the antiderivative `hs − s|s|/2`.
fn tent_integral(h: f64, s1: f64, s2: f64) -> f64 {
    let g = |s: f64| h * s - s * s.abs() / 2.0;
    if s2 > s1 {
        g(s2) - g(s1)
    } else {
        0.0
    }
}

/// Probability that a ball-`c` proposal from a uniform point of one cell
/// lands in a cell whose left edge is `u` further along.
fn ball_cell_mass(h: f64, c: f64, u: f64) -> f64 {
    tent_integral(h, (-h).max(-c - u), h.min(c - u)) / (2.0 * c * h)
}

impl DiscretizedChain {
    /// Validates that rows sum to one and that `stationary` is invariant.
    pub fn new(domain: Domain, matrix: DMatrix<f64>, stationary: Vec<f64>) -> Result<Self> {
        let n = matrix.nrows();
        if matrix.ncols() != n || stationary.len() != n || n == 0 {
            return Err(Error::InvalidMeasure(
                "transition matrix and stationary vector disagree in size".into(),
            ));
        }
        for (i, row) in matrix.row_iter().enumerate() {
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > ROW_TOL || row.iter().any(|&p| p < 0.0) {
                return Err(Error::InvalidMeasure(format!(
                    "row {i} is not a probability vector (sum {s})"
                )));
            }
        }
        let chain = DiscretizedChain {
            domain,
            matrix,
            stationary,
        };
        let drift = chain.stationarity_defect();
        if drift > STATIONARY_TOL {
            return Err(Error::InvalidMeasure(format!(
                "stationary vector moves by {drift:e}"
            )));
        }
        Ok(chain)
    }

    /// Random-walk Metropolis with ball proposals of radius `c`: exact
    /// cell-to-cell proposal masses, acceptance `min(1, m_j/m_i)` on the
    /// cell masses `m` of `density`. Proposals leaving an interval are
    /// rejected.
    pub fn mh(density: &PiecewiseDensity, radius: f64, n: usize) -> Result<Self> {
        let domain = density.domain();
        let h = domain.length() / n as f64;
        if !(radius > 0.0 && radius < domain.length() / 2.0) {
            return Err(Error::config(format!(
                "ball radius {radius} outside (0, length/2)"
            )));
        }
        let m = density.cell_masses(n);
        let mut p = DMatrix::zeros(n, n);
        let reach = (radius / h).ceil() as i64 + 1;
        for i in 0..n {
            for off in -reach..=reach {
                if off == 0 {
                    continue;
                }
                let j = i as i64 + off;
                let j = if domain.is_circle() {
                    j.rem_euclid(n as i64) as usize
                } else if (0..n as i64).contains(&j) {
                    j as usize
                } else {
                    continue;
                };
                let q = ball_cell_mass(h, radius, off as f64 * h);
                p[(i, j)] += q * (m[j] / m[i]).min(1.0);
            }
        }
        Self::fill_diagonal(&mut p);
        Self::new(domain, p, m)
    }

    /// The limiting equi-energy chain at level `i`: `(1 − p_ee)` times the
    /// Metropolis chain of `π_i` plus `p_ee` times jumps to cells of the
    /// same energy ring drawn from `π_{i+1}`, accepted with the discrete
    /// analogue of the equi-energy ratio. Cell energies are read at midpoints.
    pub fn limiting_ee(
        family: &TemperedFamily,
        level: usize,
        rings: &EnergyRingSpec,
        radius: f64,
        p_ee: f64,
        n: usize,
    ) -> Result<Self> {
        if level + 1 >= family.len() {
            return Err(Error::config(format!(
                "level {level} has no level above it"
            )));
        }
        let base = Self::mh(family.density(level)?, radius, n)?;
        let m = base.stationary.clone();
        let up = family.density(level + 1)?.cell_masses(n);
        let mids = base.midpoints();
        let energy: Vec<f64> = mids.iter().map(|&x| family.energy(x)).collect();
        let members: Vec<Vec<usize>> = energy
            .iter()
            .map(|&v| {
                let ring = rings.ring_interval(v)?;
                Ok((0..n).filter(|&j| ring.contains(energy[j])).collect())
            })
            .collect::<Result<_>>()?;
        let ring_mass: Vec<f64> = members
            .iter()
            .map(|js| js.iter().map(|&j| up[j]).sum())
            .collect();
        let mut p = base.matrix * (1.0 - p_ee);
        for i in 0..n {
            for &j in members[i].iter().filter(|&&j| j != i) {
                let ratio = (m[j] * up[i] * ring_mass[i]) / (m[i] * up[j] * ring_mass[j]);
                p[(i, j)] += p_ee * up[j] / ring_mass[i] * ratio.min(1.0);
            }
        }
        for i in 0..n {
            p[(i, i)] = 0.0;
        }
        Self::fill_diagonal(&mut p);
        Self::new(family.domain(), p, m)
    }

    /// `(1 − p)·P + p·1πᵀ`: restart from the stationary law with probability `p`.
    pub fn with_restart(&self, p: f64) -> Result<Self> {
        let n = self.len();
        let pi = DMatrix::from_fn(n, n, |_, j| self.stationary[j]);
        let mut q = &self.matrix * (1.0 - p) + pi * p;
        for i in 0..n {
            q[(i, i)] = 0.0;
        }
        Self::fill_diagonal(&mut q);
        Self::new(self.domain, q, self.stationary.clone())
    }

    /// Put the missing row mass on the diagonal.
    fn fill_diagonal(p: &mut DMatrix<f64>) {
        for i in 0..p.nrows() {
            let off: f64 = (0..p.ncols()).filter(|&j| j != i).map(|j| p[(i, j)]).sum();
            p[(i, i)] = (1.0 - off).max(0.0);
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.stationary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stationary.is_empty()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn midpoints(&self) -> Vec<f64> {
        let (a, b) = self.domain.bounds();
        let h = (b - a) / self.len() as f64;
        (0..self.len()).map(|k| a + h * (k as f64 + 0.5)).collect()
    }

    /// `max_j |(πP)_j − π_j|`.
    pub fn stationarity_defect(&self) -> f64 {
        let n = self.len();
        (0..n)
            .map(|j| {
                ((0..n)
                    .map(|i| self.stationary[i] * self.matrix[(i, j)])
                    .sum::<f64>()
                    - self.stationary[j])
                    .abs()
            })
            .fold(0.0, f64::max)
    }

    /// `max_{i,j} |π_i P_ij − π_j P_ji|`.
    pub fn detailed_balance_defect(&self) -> f64 {
        let n = self.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let flow = self.stationary[i] * self.matrix[(i, j)]
                    - self.stationary[j] * self.matrix[(j, i)];
                worst = worst.max(flow.abs());
            }
        }
        worst
    }

    pub fn check_reversible(&self) -> Result<()> {
        let defect = self.detailed_balance_defect();
        if defect > BALANCE_TOL {
            Err(Error::NonReversible(defect))
        } else {
            Ok(())
        }
    }

    /// Eigenvalues in decreasing order, from the symmetrization `D^{1/2} P D^{−1/2}`.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        self.check_reversible()?;
        let n = self.len();
        let root: Vec<f64> = self.stationary.iter().map(|p| p.sqrt()).collect();
        let s = DMatrix::from_fn(n, n, |i, j| {
            let a = root[i] / root[j] * self.matrix[(i, j)];
            let b = root[j] / root[i] * self.matrix[(j, i)];
            (a + b) / 2.0
        });
        let mut ev: Vec<f64> = s.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        Ok(ev)
    }

    /// `1/(1 − λ*)` with `λ*` the largest modulus among the eigenvalues
    /// other than the top one.
    pub fn relaxation_time(&self) -> Result<f64> {
        let ev = self.spectrum()?;
        let star = ev[1..].iter().map(|l| l.abs()).fold(0.0, f64::max);
        Ok(1.0 / (1.0 - star))
    }

    /// Cells whose midpoint lies in `set`.
    pub fn cells_in(&self, set: &IntervalUnion) -> Vec<bool> {
        self.midpoints().iter().map(|&x| set.contains(x)).collect()
    }

    /// Bottleneck ratio `Φ(A) = Σ_{i∈A, j∉A} π_i P_ij / π(A)`.
    pub fn bottleneck(&self, set: &IntervalUnion) -> Result<f64> {
        self.check_reversible()?;
        set.domain().check_same(&self.domain)?;
        let inside = self.cells_in(set);
        let mass: f64 = (0..self.len())
            .filter(|&i| inside[i])
            .map(|i| self.stationary[i])
            .sum();
        if mass <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let mut flow = 0.0;
        for i in (0..self.len()).filter(|&i| inside[i]) {
            for j in (0..self.len()).filter(|&j| !inside[j]) {
                flow += self.stationary[i] * self.matrix[(i, j)];
            }
        }
        Ok(flow / mass)
    }

    /// Half the largest row-support diameter, with cells at their midpoints.
    pub fn granularity(&self) -> f64 {
        let mids = self.midpoints();
        let mut worst: f64 = 0.0;
        for row in self.matrix.row_iter() {
            let pts: Vec<f64> = row
                .iter()
                .enumerate()
                .filter(|e| *e.1 > 0.0)
                .map(|e| mids[e.0])
                .collect();
            for (k, &a) in pts.iter().enumerate() {
                for &b in &pts[k + 1..] {
                    worst = worst.max(self.domain.dist(a, b));
                }
            }
        }
        worst / 2.0
    }

    /// Largest `log (K e^{λφ})(x) − λKφ(x) − λ² Var_{K(x,·)} φ` over cells;
    /// nonpositive whenever the exponential-moment inequality holds.
    pub fn exponential_moment_gap(&self, phi: &[f64], lambda: f64) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for row in self.matrix.row_iter() {
            let mean: f64 = row.iter().zip(phi).map(|(p, f)| p * f).sum();
            let var: f64 = row
                .iter()
                .zip(phi)
                .map(|(p, f)| p * (f - mean).powi(2))
                .sum();
            let mgf: f64 = row
                .iter()
                .zip(phi)
                .map(|(p, f)| p * (lambda * (f - mean)).exp())
                .sum();
            worst = worst.max(mgf.ln() - lambda * lambda * var);
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::targets::Potential;

    #[test]
    fn ball_masses_sum_to_one() {
        let (h, c): (f64, f64) = (1.0 / 64.0, 0.05);
        let reach = (c / h).ceil() as i64 + 1;
        let total: f64 = (-reach..=reach)
            .map(|k| ball_cell_mass(h, c, k as f64 * h))
            .sum();
        assert!((total - 1.0).abs() < 1e-14, "{total}");
    }

    #[test]
    fn flat_chain_is_doubly_stochastic_and_reversible() {
        let chain =
            DiscretizedChain::mh(&PiecewiseDensity::uniform(Domain::Circle), 0.05, 128).unwrap();
        assert!(chain.detailed_balance_defect() < 1e-15);
        for j in 0..128 {
            let col: f64 = chain.matrix().column(j).iter().sum();
            assert!((col - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn square_tooth_chains_balance() {
        let fam = TemperedFamily::with_betas(
            Domain::Circle,
            Potential::square_tooth(4, 3.0).unwrap(),
            &[1.0, 0.2],
        )
        .unwrap();
        let mh = DiscretizedChain::mh(fam.density(0).unwrap(), 0.04, 256).unwrap();
        assert!(mh.check_reversible().is_ok());
        for rings in [
            EnergyRingSpec::Full,
            EnergyRingSpec::ladder([0.0, 1.5]).unwrap(),
            EnergyRingSpec::band(1.0).unwrap(),
        ] {
            let ee = DiscretizedChain::limiting_ee(&fam, 0, &rings, 0.04, 0.3, 256).unwrap();
            assert!(ee.check_reversible().is_ok(), "{rings:?}");
        }
        let interval =
            DiscretizedChain::mh(&PiecewiseDensity::uniform(Domain::UNIT_INTERVAL), 0.1, 100)
                .unwrap();
        assert!(interval.check_reversible().is_ok());
        assert!(interval.matrix()[(0, 0)] > 0.4);
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.1, 0.8]);
        assert!(DiscretizedChain::new(Domain::Circle, m, vec![0.5, 0.5]).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        assert!(DiscretizedChain::new(Domain::Circle, m, vec![0.9, 0.1]).is_err());
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.5]);
        let chain = DiscretizedChain::new(Domain::Circle, m, vec![1.0 / 3.0, 2.0 / 3.0]).unwrap();
        assert!(chain.relaxation_time().is_ok());
    }

    #[test]
    fn non_reversible_is_detected() {
        // a deterministic 3-cycle keeps the uniform law but is not reversible
        let m = DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let chain = DiscretizedChain::new(Domain::Circle, m, vec![1.0 / 3.0; 3]).unwrap();
        assert!(matches!(
            chain.relaxation_time(),
            Err(Error::NonReversible(_))
        ));
    }

    #[test]
    fn relaxation_sandwich_small_grid() {
        let c = 0.05;
        let chain =
            DiscretizedChain::mh(&PiecewiseDensity::uniform(Domain::Circle), c, 256).unwrap();
        let tau = chain.relaxation_time().unwrap();
        assert!(tau >= 1.0 / (8.0 * c * c) && tau <= 8.0 / (c * c), "{tau}");
    }

    #[test]
    fn two_state_spectrum() {
        let m = DMatrix::from_row_slice(2, 2, &[0.7, 0.3, 0.3, 0.7]);
        let chain = DiscretizedChain::new(Domain::Circle, m, vec![0.5, 0.5]).unwrap();
        let ev = chain.spectrum().unwrap();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 0.4).abs() < 1e-14);
        assert!((chain.relaxation_time().unwrap() - 1.0 / 0.6).abs() < 1e-12);
    }

    #[test]
    fn restart_keeps_balance() {
        let chain =
            DiscretizedChain::mh(&PiecewiseDensity::uniform(Domain::Circle), 0.05, 64).unwrap();
        let lazy = chain.with_restart(0.5).unwrap();
        assert!(lazy.check_reversible().is_ok());
        assert_eq!(lazy.granularity(), 0.25);
    }
}
