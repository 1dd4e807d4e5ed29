use super::{wrap, Domain};
use crate::error::{Error, Result};

/// A finite union of disjoint half-open intervals `[lo, hi)`, sorted.
///
/// On the circle, intervals crossing `0` are stored split in two. On an
/// interval domain `[a, b]` a piece ending at `b` also contains `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    domain: Domain,
    intervals: Vec<(f64, f64)>,
}

impl IntervalUnion {
    pub fn empty(domain: Domain) -> Self {
        IntervalUnion {
            domain,
            intervals: vec![],
        }
    }

    pub fn full(domain: Domain) -> Self {
        IntervalUnion {
            domain,
            intervals: vec![domain.bounds()],
        }
    }

    /// Build from arbitrary `(lo, hi)` pairs with `lo <= hi`. Empty pairs are
    /// dropped, overlaps merged; pieces are clipped to an interval domain and
    /// wrapped on the circle.
    pub fn new(domain: Domain, raw: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let (a, b) = domain.bounds();
        let mut pieces = Vec::new();
        for (lo, hi) in raw {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(Error::InvalidSet(format!("bad interval [{lo}, {hi})")));
            }
            if lo == hi {
                continue;
            }
            match domain {
                Domain::Circle => {
                    if hi - lo >= 1.0 {
                        pieces.push((0.0, 1.0));
                        continue;
                    }
                    let start = wrap(lo);
                    let end = if start == lo { hi } else { start + (hi - lo) };
                    if end <= 1.0 {
                        pieces.push((start, end));
                    } else {
                        // recompute the wrapped end from hi to avoid drift
                        pieces.push((start, 1.0));
                        pieces.push((0.0, wrap(hi)));
                    }
                }
                Domain::Interval { .. } => {
                    let (l, h) = (lo.max(a), hi.min(b));
                    if l < h {
                        pieces.push((l, h));
                    }
                }
            }
        }
        Ok(Self::from_pieces(domain, pieces))
    }

    fn from_pieces(domain: Domain, mut pieces: Vec<(f64, f64)>) -> Self {
        pieces.retain(|p| p.0 < p.1);
        pieces.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pieces.len());
        for (lo, hi) in pieces {
            match merged.last_mut() {
                Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        IntervalUnion {
            domain,
            intervals: merged,
        }
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Lebesgue length.
    pub fn length(&self) -> f64 {
        self.intervals.iter().map(|(lo, hi)| hi - lo).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        let x = self.domain.normalize(x);
        let k = self.intervals.partition_point(|p| p.0 <= x);
        if k == 0 {
            return false;
        }
        let (_, hi) = self.intervals[k - 1];
        x < hi || (x == hi && !self.domain.is_circle() && hi == self.domain.bounds().1)
    }

    pub fn complement(&self) -> Self {
        let (a, b) = self.domain.bounds();
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        let mut cursor = a;
        for &(lo, hi) in &self.intervals {
            if lo > cursor {
                out.push((cursor, lo));
            }
            cursor = hi;
        }
        if cursor < b {
            out.push((cursor, b));
        }
        IntervalUnion {
            domain: self.domain,
            intervals: out,
        }
    }

    pub fn union(&self, other: &IntervalUnion) -> Self {
        let pieces = self
            .intervals
            .iter()
            .chain(other.intervals.iter())
            .copied()
            .collect();
        Self::from_pieces(self.domain, pieces)
    }

    pub fn intersection(&self, other: &IntervalUnion) -> Self {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            for &(c, d) in &other.intervals {
                let (lo, hi) = (a.max(c), b.min(d));
                if lo < hi {
                    out.push((lo, hi));
                }
            }
        }
        Self::from_pieces(self.domain, out)
    }

    /// The δ-thickening `B_δ`: every point within distance δ of the set.
    pub fn thicken(&self, delta: f64) -> Self {
        if delta <= 0.0 || self.is_empty() {
            return self.clone();
        }
        let grown = self
            .intervals
            .iter()
            .map(|&(lo, hi)| (lo - delta, hi + delta));
        // clipping/wrapping cannot fail for finite inputs
        Self::new(self.domain, grown).expect("finite thickening")
    }

    /// The inner parallel set `B_{−δ} = ((B^c)_δ)^c`.
    pub fn erode(&self, delta: f64) -> Self {
        self.complement().thicken(delta).complement()
    }
}
