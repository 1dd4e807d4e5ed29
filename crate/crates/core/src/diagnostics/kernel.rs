use rand::RngCore;

use crate::error::{Error, Result};
use crate::geometry::{Domain, IntervalUnion, PiecewiseLaw, UniformPiece};
use crate::rng::{unit_f64, StepVariates};
use crate::samplers::{mh_step, Proposal, RingIndex};
use crate::targets::{EnergyRingSpec, PiecewiseDensity, TemperedFamily};

/// A Markov kernel on a one-dimensional domain.
pub trait Kernel: Send + Sync {
    fn domain(&self) -> Domain;

    /// One draw from `K(x, ·)`.
    fn sample(&self, x: f64, rng: &mut dyn RngCore) -> f64;

    /// The exact one-step law, when it is a finite mixture of atoms and
    /// uniform pieces.
    fn law(&self, _x: f64) -> Result<PiecewiseLaw> {
        Err(Error::NoExactLaw)
    }
}

impl<K: Kernel + ?Sized> Kernel for &K {
    fn domain(&self) -> Domain {
        (**self).domain()
    }

    fn sample(&self, x: f64, rng: &mut dyn RngCore) -> f64 {
        (**self).sample(x, rng)
    }

    fn law(&self, x: f64) -> Result<PiecewiseLaw> {
        (**self).law(x)
    }
}

pub(crate) fn uniform(rng: &mut dyn RngCore) -> f64 {
    unit_f64(rng.next_u64())
}

/// `K(x, ·) = δ_x`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityKernel(pub Domain);

impl Kernel for IdentityKernel {
    fn domain(&self) -> Domain {
        self.0
    }

    fn sample(&self, x: f64, _rng: &mut dyn RngCore) -> f64 {
        self.0.normalize(x)
    }

    fn law(&self, x: f64) -> Result<PiecewiseLaw> {
        Ok(PiecewiseLaw::point(self.0, x))
    }
}

/// `K(x, ·) = ν` for every `x`.
#[derive(Debug, Clone)]
pub struct ConstantKernel(pub PiecewiseLaw);

impl Kernel for ConstantKernel {
    fn domain(&self) -> Domain {
        self.0.domain()
    }

    fn sample(&self, _x: f64, rng: &mut dyn RngCore) -> f64 {
        self.0.sample(uniform(rng))
    }

    fn law(&self, _x: f64) -> Result<PiecewiseLaw> {
        Ok(self.0.clone())
    }
}

/// `(1 − p)·Unif(ball_c(x)) + p·Unif(Ω)`, followed by a deterministic
/// shift `δ`. On an interval the ball is folded back at the ends and the
/// shift is clamped, so both stages are 1-Lipschitz and the curvature is
/// at least `p`.
#[derive(Debug, Clone, Copy)]
pub struct LazyUniformKernel {
    domain: Domain,
    radius: f64,
    p: f64,
    shift: f64,
}

impl LazyUniformKernel {
    pub fn new(domain: Domain, radius: f64, p: f64) -> Result<Self> {
        if !(radius > 0.0 && radius <= domain.length() / 2.0) {
            return Err(Error::config(format!(
                "lazy-uniform radius {radius} outside (0, length/2]"
            )));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::config(format!(
                "lazy-uniform weight {p} outside [0, 1]"
            )));
        }
        Ok(LazyUniformKernel {
            domain,
            radius,
            p,
            shift: 0.0,
        })
    }

    /// The same kernel followed by `y ↦ y + δ`; `sup_x W(K_δ(x,·), K(x,·)) ≤ |δ|`.
    pub fn with_shift(self, shift: f64) -> Self {
        LazyUniformKernel { shift, ..self }
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn weight(&self) -> f64 {
        self.p
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    fn fold(&self, y: f64) -> f64 {
        let (a, b) = self.domain.bounds();
        match self.domain {
            Domain::Circle => self.domain.normalize(y),
            Domain::Interval { .. } if y < a => 2.0 * a - y,
            Domain::Interval { .. } if y > b => 2.0 * b - y,
            Domain::Interval { .. } => y,
        }
    }

    fn displace(&self, y: f64) -> f64 {
        let (a, b) = self.domain.bounds();
        if self.domain.is_circle() {
            self.domain.normalize(y + self.shift)
        } else {
            (y + self.shift).clamp(a, b)
        }
    }

    /// Unshifted uniform pieces as `(lo, hi, mass)`, possibly leaving `[0, 1)` on the circle.
    fn raw_pieces(&self, x: f64) -> Vec<(f64, f64, f64)> {
        let (a, b) = self.domain.bounds();
        let c = self.radius;
        let q = 1.0 - self.p;
        let mut out = vec![(a, b, self.p)];
        if self.domain.is_circle() {
            out.push((x - c, x + c, q));
            return out;
        }
        let w = q / (2.0 * c);
        out.push((
            (x - c).max(a),
            (x + c).min(b),
            w * ((x + c).min(b) - (x - c).max(a)),
        ));
        if x - c < a {
            out.push((a, 2.0 * a - (x - c), w * (a - (x - c))));
        }
        if x + c > b {
            out.push((2.0 * b - (x + c), b, w * (x + c - b)));
        }
        out
    }
}

impl Kernel for LazyUniformKernel {
    fn domain(&self) -> Domain {
        self.domain
    }

    fn sample(&self, x: f64, rng: &mut dyn RngCore) -> f64 {
        let (a, b) = self.domain.bounds();
        let (u, w) = (uniform(rng), uniform(rng));
        let y = if u < self.p {
            a + w * (b - a)
        } else {
            self.fold(x + self.radius * (2.0 * w - 1.0))
        };
        self.displace(y)
    }

    fn law(&self, x: f64) -> Result<PiecewiseLaw> {
        let (a, b) = self.domain.bounds();
        let x = self.domain.normalize(x);
        let mut atoms = Vec::new();
        let mut pieces = Vec::new();
        for (lo, hi, mass) in self.raw_pieces(x) {
            if mass <= 0.0 || hi <= lo {
                continue;
            }
            let (lo, hi) = (lo + self.shift, hi + self.shift);
            if self.domain.is_circle() {
                pieces.extend(PiecewiseLaw::arc_pieces(self.domain, lo, hi, mass).0);
                continue;
            }
            let density = mass / (hi - lo);
            let below = (a.min(hi) - lo).max(0.0);
            let above = (hi - b.max(lo)).max(0.0);
            if below > 0.0 {
                atoms.push((a, density * below));
            }
            if above > 0.0 {
                atoms.push((b, density * above));
            }
            let (l, h) = (lo.max(a), hi.min(b));
            if h > l {
                pieces.push(UniformPiece {
                    lo: l,
                    hi: h,
                    mass: density * (h - l),
                });
            }
        }
        PiecewiseLaw::new(self.domain, atoms, pieces)
    }
}

/// Random-walk (or independence) Metropolis kernel towards a density.
#[derive(Debug, Clone)]
pub struct MhKernel {
    density: PiecewiseDensity,
    proposal: Proposal,
}

impl MhKernel {
    pub fn new(density: PiecewiseDensity, proposal: Proposal) -> Result<Self> {
        proposal.validate(density.domain())?;
        Ok(MhKernel { density, proposal })
    }

    pub fn density(&self) -> &PiecewiseDensity {
        &self.density
    }

    pub fn proposal(&self) -> Proposal {
        self.proposal
    }

    fn is_flat(&self) -> bool {
        self.density.pieces().iter().all(|p| p.slope == 0.0)
    }

    /// Proposal support and its density.
    fn proposal_support(&self, x: f64) -> (IntervalUnion, f64) {
        let domain = self.density.domain();
        match self.proposal {
            Proposal::Independent => (IntervalUnion::full(domain), 1.0 / domain.length()),
            Proposal::Ball { radius } => (
                IntervalUnion::new(domain, [(x - radius, x + radius)]).expect("finite ball"),
                1.0 / (2.0 * radius),
            ),
        }
    }
}

impl Kernel for MhKernel {
    fn domain(&self) -> Domain {
        self.density.domain()
    }

    fn sample(&self, x: f64, rng: &mut dyn RngCore) -> f64 {
        let v = StepVariates {
            kind: 0.0,
            proposal: uniform(rng),
            accept: uniform(rng),
        };
        mh_step(
            self.domain(),
            x,
            self.proposal,
            |y| self.density.log_unnormalized(y),
            &v,
        )
        .0
    }

    /// Exact for piecewise-flat targets.
    fn law(&self, x: f64) -> Result<PiecewiseLaw> {
        if !self.is_flat() {
            return Err(Error::NoExactLaw);
        }
        let domain = self.domain();
        let x = domain.normalize(x);
        let lx = self.density.log_unnormalized(x);
        let (support, q) = self.proposal_support(x);
        let mut pieces = Vec::new();
        let mut moved = 0.0;
        for &(lo, hi) in support.intervals() {
            for p in self
                .density
                .pieces()
                .iter()
                .filter(|p| p.lo < hi && p.hi > lo)
            {
                let (a, b) = (lo.max(p.lo), hi.min(p.hi));
                let mass = q * (b - a) * (p.log_start - lx).exp().min(1.0);
                if b > a && mass > 0.0 {
                    moved += mass;
                    pieces.push(UniformPiece { lo: a, hi: b, mass });
                }
            }
        }
        PiecewiseLaw::new(domain, vec![(x, (1.0 - moved).max(0.0))], pieces)
    }
}

/// Shared parts of the limiting and empirical equi-energy kernels at level `i`.
#[derive(Debug, Clone)]
struct EeParts {
    family: TemperedFamily,
    level: usize,
    rings: EnergyRingSpec,
    mh: MhKernel,
    p_ee: f64,
}

impl EeParts {
    fn new(
        family: TemperedFamily,
        level: usize,
        rings: EnergyRingSpec,
        proposal: Proposal,
        p_ee: f64,
    ) -> Result<Self> {
        if level + 1 >= family.len() {
            return Err(Error::config(format!(
                "level {level} has no level above it"
            )));
        }
        if !(0.0..=1.0).contains(&p_ee) {
            return Err(Error::config(format!(
                "p_ee must lie in [0, 1], got {p_ee}"
            )));
        }
        let mh = MhKernel::new(family.density(level)?.clone(), proposal)?;
        Ok(EeParts {
            family,
            level,
            rings,
            mh,
            p_ee,
        })
    }

    fn jump(&self, x: f64, q: Option<f64>, accept: f64) -> f64 {
        match q {
            Some(q)
                if accept
                    < self
                        .family
                        .ee_acceptance(self.level, x, q, &self.rings)
                        .unwrap_or(0.0) =>
            {
                q
            }
            _ => x,
        }
    }

    /// Mix the Metropolis law with an equi-energy law built from weighted
    /// candidates `(lo, hi, weight)` (atoms when `lo == hi`).
    fn law(&self, x: f64, candidates: Vec<(f64, f64, f64)>) -> Result<PiecewiseLaw> {
        let domain = self.family.domain();
        let mh = self.mh.law(x)?;
        if self.p_ee == 0.0 {
            return Ok(mh);
        }
        let mut atoms = Vec::new();
        let mut pieces = Vec::new();
        let mut stay = 1.0;
        for (lo, hi, w) in candidates {
            let q = if lo == hi { lo } else { (lo + hi) / 2.0 };
            let m = w * self.family.ee_acceptance(self.level, x, q, &self.rings)?;
            stay -= m;
            if lo == hi {
                atoms.push((lo, m));
            } else {
                pieces.push(UniformPiece { lo, hi, mass: m });
            }
        }
        atoms.push((x, stay.max(0.0)));
        let ee = PiecewiseLaw::new(domain, atoms, pieces)?;
        PiecewiseLaw::mixture(&[(1.0 - self.p_ee, &mh), (self.p_ee, &ee)])
    }
}

/// The limiting equi-energy kernel `K∞` at level `i`: Metropolis with
/// probability `1 − p_ee`, else a jump to `π_{i+1}` restricted to the
/// current energy ring.
#[derive(Debug, Clone)]
pub struct LimitingEeKernel(EeParts);

impl LimitingEeKernel {
    pub fn new(
        family: TemperedFamily,
        level: usize,
        rings: EnergyRingSpec,
        proposal: Proposal,
        p_ee: f64,
    ) -> Result<Self> {
        Ok(LimitingEeKernel(EeParts::new(
            family, level, rings, proposal, p_ee,
        )?))
    }
}

impl Kernel for LimitingEeKernel {
    fn domain(&self) -> Domain {
        self.0.family.domain()
    }

    fn sample(&self, x: f64, rng: &mut dyn RngCore) -> f64 {
        let e = &self.0;
        if uniform(rng) >= e.p_ee {
            return e.mh.sample(x, rng);
        }
        let (u, accept) = (uniform(rng), uniform(rng));
        let q = e
            .rings
            .ring_interval(e.family.energy(x))
            .and_then(|ring| e.family.ring_restriction(e.level + 1, ring))
            .map(|r| r.sample(u))
            .ok();
        e.jump(x, q, accept)
    }

    /// Exact when both levels are piecewise flat.
    fn law(&self, x: f64) -> Result<PiecewiseLaw> {
        let e = &self.0;
        let x = e.family.domain().normalize(x);
        let upper = e.family.density(e.level + 1)?;
        if upper.pieces().iter().any(|p| p.slope != 0.0) {
            return Err(Error::NoExactLaw);
        }
        let ring = e.rings.ring_interval(e.family.energy(x))?;
        let preimage = e.family.ring_preimage(ring);
        let total = upper.mass(&preimage);
        if total <= 0.0 {
            return Err(Error::ZeroMass);
        }
        let mut candidates = Vec::new();
        for &(lo, hi) in preimage.intervals() {
            for p in upper.pieces().iter().filter(|p| p.lo < hi && p.hi > lo) {
                let (a, b) = (lo.max(p.lo), hi.min(p.hi));
                if b > a {
                    candidates.push((a, b, upper.mass_between(a, b) / total));
                }
            }
        }
        e.law(x, candidates)
    }
}

/// The equi-energy kernel `K_t` at level `i`, drawing jumps from a frozen
/// snapshot of the level-`(i+1)` history.
#[derive(Debug, Clone)]
pub struct EmpiricalEeKernel {
    parts: EeParts,
    index: RingIndex,
}

impl EmpiricalEeKernel {
    pub fn new(
        family: TemperedFamily,
        level: usize,
        rings: EnergyRingSpec,
        proposal: Proposal,
        p_ee: f64,
        history: &[f64],
    ) -> Result<Self> {
        let parts = EeParts::new(family, level, rings, proposal, p_ee)?;
        let mut index = RingIndex::new(&parts.rings, parts.family.potential().range());
        for &x in history {
            index.push(x, parts.family.energy(x))?;
        }
        Ok(EmpiricalEeKernel { parts, index })
    }

    pub fn history_len(&self) -> usize {
        self.index.len()
    }
}

impl Kernel for EmpiricalEeKernel {
    fn domain(&self) -> Domain {
        self.parts.family.domain()
    }

    fn sample(&self, x: f64, rng: &mut dyn RngCore) -> f64 {
        let e = &self.parts;
        if uniform(rng) >= e.p_ee {
            return e.mh.sample(x, rng);
        }
        let (u, accept) = (uniform(rng), uniform(rng));
        let q = self.index.pick(e.family.energy(x), u).ok().flatten();
        e.jump(x, q, accept)
    }

    fn law(&self, x: f64) -> Result<PiecewiseLaw> {
        let e = &self.parts;
        let x = e.family.domain().normalize(x);
        let members = self.index.members(e.family.energy(x))?;
        let w = 1.0 / members.len().max(1) as f64;
        e.law(x, members.into_iter().map(|q| (q, q, w)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Lane, RngStream, StreamId};
    use crate::targets::Potential;

    fn rng() -> RngStream {
        RngStream::new(11, StreamId::new(0, 0, Lane::Step))
    }

    /// Kolmogorov distance between a law and a sample from the kernel.
    fn ks(law: &PiecewiseLaw, k: &dyn Kernel, x: f64, n: usize) -> f64 {
        let mut r = rng();
        let mut ys: Vec<f64> = (0..n).map(|_| k.sample(x, &mut r)).collect();
        ys.sort_by(f64::total_cmp);
        let nf = n as f64;
        let mut d: f64 = 0.0;
        let mut i = 0;
        while i < n {
            let j = ys[i..].partition_point(|&v| v == ys[i]) + i;
            d = d
                .max((law.cdf(ys[i]) - j as f64 / nf).abs())
                .max((law.cdf_left(ys[i]) - i as f64 / nf).abs());
            i = j;
        }
        d
    }

    #[test]
    fn lazy_uniform_law_matches_sampler() {
        for (domain, x, shift) in [
            (Domain::Circle, 0.97, 0.0),
            (Domain::Circle, 0.3, 0.01),
            (Domain::UNIT_INTERVAL, 0.02, 0.0),
            (Domain::UNIT_INTERVAL, 0.95, 0.004),
            (Domain::UNIT_INTERVAL, 0.5, -0.004),
        ] {
            let k = LazyUniformKernel::new(domain, 0.1, 0.5)
                .unwrap()
                .with_shift(shift);
            let law = k.law(x).unwrap();
            let d = ks(&law, &k, x, 20_000);
            assert!(d < 0.015, "{domain} {x} {shift} {d}");
        }
    }

    #[test]
    fn mh_law_matches_sampler() {
        let fam = TemperedFamily::with_betas(
            Domain::Circle,
            Potential::square_tooth(4, 2.0).unwrap(),
            &[1.0],
        )
        .unwrap();
        let k = MhKernel::new(
            fam.density(0).unwrap().clone(),
            Proposal::Ball { radius: 0.1 },
        )
        .unwrap();
        for x in [0.05, 0.1, 0.2, 0.99] {
            let law = k.law(x).unwrap();
            let d = ks(&law, &k, x, 20_000);
            assert!(d < 0.015, "{x} {d}");
        }
        let saw =
            TemperedFamily::with_betas(Domain::Circle, Potential::saw_tooth(4.0).unwrap(), &[1.0])
                .unwrap();
        let k = MhKernel::new(saw.density(0).unwrap().clone(), Proposal::Independent).unwrap();
        assert!(matches!(k.law(0.1), Err(Error::NoExactLaw)));
    }

    #[test]
    fn interval_mh_rejects_outside() {
        let k = MhKernel::new(
            PiecewiseDensity::uniform(Domain::UNIT_INTERVAL),
            Proposal::Ball { radius: 0.1 },
        )
        .unwrap();
        let law = k.law(0.0).unwrap();
        let hold: f64 = law.atoms().map(|a| a.1).sum();
        assert!((hold - 0.5).abs() < 1e-12);
    }

    #[test]
    fn ee_laws_match_samplers() {
        let fam = TemperedFamily::with_betas(
            Domain::Circle,
            Potential::square_tooth(4, 2.0).unwrap(),
            &[1.0, 0.3],
        )
        .unwrap();
        for rings in [
            EnergyRingSpec::Full,
            EnergyRingSpec::ladder([0.0, 1.0]).unwrap(),
            EnergyRingSpec::band(1.5).unwrap(),
        ] {
            let k = LimitingEeKernel::new(
                fam.clone(),
                0,
                rings.clone(),
                Proposal::Ball { radius: 0.05 },
                0.4,
            )
            .unwrap();
            for x in [0.01, 0.2] {
                assert!(
                    ks(&k.law(x).unwrap(), &k, x, 20_000) < 0.015,
                    "{rings:?} {x}"
                );
            }
            let history = [0.01, 0.1, 0.3, 0.55, 0.8, 0.9];
            let k = EmpiricalEeKernel::new(
                fam.clone(),
                0,
                rings.clone(),
                Proposal::Ball { radius: 0.05 },
                0.4,
                &history,
            )
            .unwrap();
            for x in [0.01, 0.2] {
                assert!(
                    ks(&k.law(x).unwrap(), &k, x, 20_000) < 0.015,
                    "{rings:?} {x}"
                );
            }
        }
        assert!(
            LimitingEeKernel::new(fam, 1, EnergyRingSpec::Full, Proposal::Independent, 0.1)
                .is_err()
        );
    }

    #[test]
    fn empty_ring_holds() {
        let fam = TemperedFamily::with_betas(
            Domain::Circle,
            Potential::square_tooth(4, 2.0).unwrap(),
            &[1.0, 0.3],
        )
        .unwrap();
        let rings = EnergyRingSpec::ladder([0.0, 1.0]).unwrap();
        let k = EmpiricalEeKernel::new(fam, 0, rings, Proposal::Ball { radius: 0.05 }, 1.0, &[0.2])
            .unwrap();
        let law = k.law(0.01).unwrap();
        assert_eq!(law.atoms().collect::<Vec<_>>(), vec![(0.01, 1.0)]);
    }
}
