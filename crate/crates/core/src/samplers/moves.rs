use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::rng::StepVariates;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    /// The state drawn when a level starts after its burn-in.
    Init,
    MhAccept,
    MhReject,
    EeAccept,
    EeReject,
    /// Equi-energy branch with an empty ring: the state is held.
    EeSkip,
    Swap,
    Hold,
}

impl MoveKind {
    pub const ALL: [MoveKind; 8] = [
        MoveKind::Init,
        MoveKind::MhAccept,
        MoveKind::MhReject,
        MoveKind::EeAccept,
        MoveKind::EeReject,
        MoveKind::EeSkip,
        MoveKind::Swap,
        MoveKind::Hold,
    ];

    pub fn label(self) -> &'static str {
        match self {
            MoveKind::Init => "init",
            MoveKind::MhAccept => "mh-accept",
            MoveKind::MhReject => "mh-reject",
            MoveKind::EeAccept => "ee-accept",
            MoveKind::EeReject => "ee-reject",
            MoveKind::EeSkip => "ee-skip",
            MoveKind::Swap => "swap",
            MoveKind::Hold => "hold",
        }
    }

    /// Whether the move can leave the state unchanged only by coincidence.
    pub fn moves_state(self) -> bool {
        matches!(
            self,
            MoveKind::MhAccept | MoveKind::EeAccept | MoveKind::Swap
        )
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MoveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MoveKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::config(format!("unknown move kind {s:?}")))
    }
}

/// Metropolis proposal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Proposal {
    /// Uniform on the ball of the given radius around the current point.
    Ball { radius: f64 },
    /// Uniform on the whole domain, independent of the current point.
    Independent,
}

impl Proposal {
    pub fn validate(&self, domain: Domain) -> Result<()> {
        match *self {
            Proposal::Ball { radius } if !(radius > 0.0 && radius < domain.length() / 2.0) => {
                Err(Error::config(format!(
                    "ball radius must lie in (0, {}), got {radius}",
                    domain.length() / 2.0
                )))
            }
            _ => Ok(()),
        }
    }

    /// Proposed point from one uniform; `None` when it leaves an interval.
    pub fn propose(&self, domain: Domain, x: f64, u: f64) -> Option<f64> {
        let (a, b) = domain.bounds();
        match *self {
            Proposal::Independent => Some(a + u * (b - a)),
            Proposal::Ball { radius } => {
                let y = x + radius * (2.0 * u - 1.0);
                if domain.is_circle() {
                    Some(domain.normalize(y))
                } else {
                    (a..=b).contains(&y).then_some(y)
                }
            }
        }
    }
}

/// One Metropolis step towards `exp(log_target)`.
pub fn mh_step(
    domain: Domain,
    x: f64,
    proposal: Proposal,
    log_target: impl Fn(f64) -> f64,
    v: &StepVariates,
) -> (f64, MoveKind) {
    match proposal.propose(domain, x, v.proposal) {
        Some(y) if v.accept < (log_target(y) - log_target(x)).exp().min(1.0) => {
            (y, MoveKind::MhAccept)
        }
        _ => (x, MoveKind::MhReject),
    }
}

/// Swap probability between levels with log-densities `lp0`, `lp1`. For
/// tempered targets this is `min(1, exp((V(x0) − V(x1))(β0 − β1)))`: handing
/// the colder level the lower energy is always accepted, which keeps
/// `π0 ⊗ π1` invariant.
pub fn pt_swap_probability(
    x0: f64,
    x1: f64,
    lp0: impl Fn(f64) -> f64,
    lp1: impl Fn(f64) -> f64,
) -> f64 {
    (lp0(x1) + lp1(x0) - lp0(x0) - lp1(x1)).exp().min(1.0)
}
