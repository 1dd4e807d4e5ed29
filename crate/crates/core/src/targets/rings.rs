use crate::error::{Error, Result};

/// The half-open energy band `[lo, hi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RingInterval {
    pub lo: f64,
    pub hi: f64,
}

impl RingInterval {
    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v < self.hi
    }
}

/// How an energy `v` is mapped to the band of energies it may exchange with.
#[derive(Debug, Clone, PartialEq)]
pub enum EnergyRingSpec {
    /// Fixed cuts `H_0 < H_1 < …`; the last ring is `[H_last, ∞)`. A trailing
    /// `∞` cut is accepted and dropped.
    Ladder {
        cuts: Vec<f64>,
    },
    /// Band of half-width `eps` around `v`.
    Band {
        eps: f64,
    },
    Full,
}

impl EnergyRingSpec {
    pub fn ladder(cuts: impl IntoIterator<Item = f64>) -> Result<Self> {
        let mut cuts: Vec<f64> = cuts.into_iter().collect();
        while cuts.last().is_some_and(|c| *c == f64::INFINITY) {
            cuts.pop();
        }
        if cuts.is_empty() {
            return Err(Error::config("ladder needs at least one finite cut"));
        }
        if cuts.iter().any(|c| !c.is_finite()) || cuts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::config(format!(
                "ladder cuts must be finite and strictly increasing: {cuts:?}"
            )));
        }
        Ok(EnergyRingSpec::Ladder { cuts })
    }

    pub fn band(eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::config(format!(
                "band half-width must be positive, got {eps}"
            )));
        }
        Ok(EnergyRingSpec::Band { eps })
    }

    /// Index of the ladder ring holding `v`; `None` for other variants.
    pub fn ladder_index(&self, v: f64) -> Result<Option<usize>> {
        match self {
            EnergyRingSpec::Ladder { cuts } => {
                if v < cuts[0] {
                    return Err(Error::BelowLadder {
                        value: v,
                        bottom: cuts[0],
                    });
                }
                Ok(Some(cuts.partition_point(|&c| c <= v) - 1))
            }
            _ => Ok(None),
        }
    }

    /// Number of ladder rings; `None` for other variants.
    pub fn ladder_len(&self) -> Option<usize> {
        match self {
            EnergyRingSpec::Ladder { cuts } => Some(cuts.len()),
            _ => None,
        }
    }

    /// The ladder ring with the given index.
    pub fn ladder_ring(&self, k: usize) -> Option<RingInterval> {
        match self {
            EnergyRingSpec::Ladder { cuts } if k < cuts.len() => Some(RingInterval {
                lo: cuts[k],
                hi: cuts.get(k + 1).copied().unwrap_or(f64::INFINITY),
            }),
            _ => None,
        }
    }

    /// The ring of energies `v` exchanges with; always contains `v`.
    pub fn ring_interval(&self, v: f64) -> Result<RingInterval> {
        match self {
            EnergyRingSpec::Ladder { .. } => {
                let k = self.ladder_index(v)?.expect("ladder");
                Ok(self.ladder_ring(k).expect("index in range"))
            }
            EnergyRingSpec::Band { eps } => Ok(RingInterval {
                lo: v - eps,
                hi: v + eps,
            }),
            EnergyRingSpec::Full => Ok(RingInterval {
                lo: f64::NEG_INFINITY,
                hi: f64::INFINITY,
            }),
        }
    }
}
