use crate::error::{Error, Result};
use crate::geometry::{Domain, EmpiricalMeasure};
use crate::targets::EnergyRingSpec;

const BAND_BINS: usize = 1024;

/// Binary indexed tree over bin counts.
#[derive(Debug, Clone)]
struct Fenwick {
    tree: Vec<usize>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Fenwick {
            tree: vec![0; n + 1],
        }
    }

    fn add(&mut self, i: usize) {
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += 1;
            k += k & k.wrapping_neg();
        }
    }

    /// Sum of bins `0..i`.
    fn prefix(&self, i: usize) -> usize {
        let mut k = i;
        let mut s = 0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Smallest bin `b` with `prefix(b + 1) > target`.
    fn find(&self, mut target: usize) -> usize {
        let mut pos = 0;
        let mut step = (self.tree.len() - 1).next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos
    }
}

/// The energy-ring view of one level's history: supports uniform draws
/// from `{X_s : V(X_s) ∈ H(v)}` with multiplicity.
#[derive(Debug, Clone)]
pub struct RingIndex(Store);

#[derive(Debug, Clone)]
enum Store {
    Full {
        points: Vec<f64>,
    },
    Ladder {
        spec: EnergyRingSpec,
        buckets: Vec<Vec<f64>>,
    },
    /// Energies binned on `[vmin, vmin + bins·width)`, each bin sorted by
    /// energy, so a band query is two binary searches plus a Fenwick range.
    Band {
        eps: f64,
        vmin: f64,
        width: f64,
        bins: Vec<Vec<(f64, f64)>>,
        counts: Fenwick,
        len: usize,
    },
}

/// Matching entries of a band query: a tail of the first bin, whole middle
/// bins, and a head of the last bin.
struct BandSpan {
    first: usize,
    first_range: (usize, usize),
    last: usize,
    last_len: usize,
    middle: usize,
}

impl RingIndex {
    /// Empty index; `energy_range` bounds the potential on the domain.
    pub fn new(spec: &EnergyRingSpec, energy_range: (f64, f64)) -> Self {
        RingIndex(match spec {
            EnergyRingSpec::Full => Store::Full { points: vec![] },
            EnergyRingSpec::Ladder { cuts } => Store::Ladder {
                spec: spec.clone(),
                buckets: vec![vec![]; cuts.len()],
            },
            EnergyRingSpec::Band { eps } => {
                let (lo, hi) = energy_range;
                let width = if hi > lo {
                    (hi - lo) / BAND_BINS as f64
                } else {
                    1.0
                };
                Store::Band {
                    eps: *eps,
                    vmin: lo,
                    width,
                    bins: vec![vec![]; BAND_BINS],
                    counts: Fenwick::new(BAND_BINS),
                    len: 0,
                }
            }
        })
    }

    pub fn len(&self) -> usize {
        match &self.0 {
            Store::Full { points } => points.len(),
            Store::Ladder { buckets, .. } => buckets.iter().map(Vec::len).sum(),
            Store::Band { len, .. } => *len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn bin_of(vmin: f64, width: f64, v: f64) -> usize {
        (((v - vmin) / width).floor().max(0.0) as usize).min(BAND_BINS - 1)
    }

    /// Add a history point with energy `v`.
    pub fn push(&mut self, x: f64, v: f64) -> Result<()> {
        match &mut self.0 {
            Store::Full { points } => points.push(x),
            Store::Ladder { spec, buckets } => {
                let k = spec.ladder_index(v)?.expect("ladder index");
                buckets[k].push(x);
            }
            Store::Band {
                vmin,
                width,
                bins,
                counts,
                len,
                ..
            } => {
                let b = Self::bin_of(*vmin, *width, v);
                let at = bins[b].partition_point(|e| e.0 <= v);
                bins[b].insert(at, (v, x));
                counts.add(b);
                *len += 1;
            }
        }
        Ok(())
    }

    fn band_span(&self, v: f64) -> Option<BandSpan> {
        let Store::Band {
            eps,
            vmin,
            width,
            bins,
            counts,
            ..
        } = &self.0
        else {
            return None;
        };
        let (lo, hi) = (v - eps, v + eps);
        let (first, last) = (
            Self::bin_of(*vmin, *width, lo),
            Self::bin_of(*vmin, *width, hi),
        );
        let start = bins[first].partition_point(|e| e.0 < lo);
        if first == last {
            let end = bins[first].partition_point(|e| e.0 < hi);
            return Some(BandSpan {
                first,
                first_range: (start, end.max(start)),
                last,
                last_len: 0,
                middle: 0,
            });
        }
        let middle = counts.prefix(last) - counts.prefix(first + 1);
        let last_len = bins[last].partition_point(|e| e.0 < hi);
        Some(BandSpan {
            first,
            first_range: (start, bins[first].len()),
            last,
            last_len,
            middle,
        })
    }

    /// Ring size `|D̂_v|`.
    pub fn count(&self, v: f64) -> Result<usize> {
        Ok(match &self.0 {
            Store::Full { points } => points.len(),
            Store::Ladder { spec, buckets } => {
                buckets[spec.ladder_index(v)?.expect("ladder")].len()
            }
            Store::Band { .. } => {
                let s = self.band_span(v).expect("band");
                s.first_range.1 - s.first_range.0 + s.middle + s.last_len
            }
        })
    }

    /// Uniform draw from the ring of `v` using one variate; `None` if empty.
    pub fn pick(&self, v: f64, u: f64) -> Result<Option<f64>> {
        let n = self.count(v)?;
        if n == 0 {
            return Ok(None);
        }
        let k = ((u * n as f64) as usize).min(n - 1);
        Ok(Some(match &self.0 {
            Store::Full { points } => points[k],
            Store::Ladder { spec, buckets } => buckets[spec.ladder_index(v)?.expect("ladder")][k],
            Store::Band { bins, counts, .. } => {
                let s = self.band_span(v).expect("band");
                let head = s.first_range.1 - s.first_range.0;
                if k < head {
                    bins[s.first][s.first_range.0 + k].1
                } else if k < head + s.middle {
                    let target = counts.prefix(s.first + 1) + (k - head);
                    let b = counts.find(target);
                    bins[b][target - counts.prefix(b)].1
                } else {
                    bins[s.last][k - head - s.middle].1
                }
            }
        }))
    }

    /// Ring contents in index order.
    pub fn members(&self, v: f64) -> Result<Vec<f64>> {
        let n = self.count(v)?;
        (0..n)
            .map(|k| {
                Ok(self
                    .pick(v, (k as f64 + 0.5) / n as f64)?
                    .expect("nonempty"))
            })
            .collect()
    }

    /// Uniform empirical measure on the ring of `v`.
    pub fn lookup(&self, domain: Domain, v: f64) -> Result<EmpiricalMeasure> {
        let members = self.members(v)?;
        if members.is_empty() {
            Ok(EmpiricalMeasure::empty(domain))
        } else {
            EmpiricalMeasure::uniform(domain, &members)
        }
    }

    /// Check that the index holds exactly `history` filtered into rings.
    /// Entries before the watermark in `state` were verified by earlier calls.
    pub(crate) fn audit(
        &self,
        history: &[f64],
        energy: impl Fn(f64) -> f64,
        state: &mut AuditState,
    ) -> Result<()> {
        let fail = |what: &str| {
            Err(Error::InvalidMeasure(format!(
                "ring index out of sync: {what}"
            )))
        };
        if self.len() != history.len() {
            return fail("size");
        }
        let checked = state.checked;
        match &self.0 {
            Store::Full { points } => {
                if points[checked..] != history[checked..] {
                    return fail("full ring");
                }
            }
            Store::Ladder { spec, buckets } => {
                state.cursor.resize(buckets.len(), 0);
                for &x in &history[checked..] {
                    let k = spec.ladder_index(energy(x))?.expect("ladder");
                    if buckets[k].get(state.cursor[k]) != Some(&x) {
                        return fail("ladder bucket");
                    }
                    state.cursor[k] += 1;
                }
            }
            Store::Band {
                vmin,
                width,
                bins,
                counts,
                ..
            } => {
                for (b, bin) in bins.iter().enumerate() {
                    if counts.prefix(b + 1) - counts.prefix(b) != bin.len()
                        || bin.windows(2).any(|w| w[0].0 > w[1].0)
                    {
                        return fail("band bin");
                    }
                }
                for &x in &history[checked..] {
                    let v = energy(x);
                    let bin = &bins[Self::bin_of(*vmin, *width, v)];
                    let from = bin.partition_point(|e| e.0 < v);
                    if !bin[from..]
                        .iter()
                        .take_while(|e| e.0 == v)
                        .any(|e| e.1 == x)
                    {
                        return fail("band member");
                    }
                }
            }
        }
        state.checked = history.len();
        Ok(())
    }
}

/// Progress of incremental [`RingIndex::audit`] calls.
#[derive(Debug, Clone, Default)]
pub(crate) struct AuditState {
    checked: usize,
    cursor: Vec<usize>,
}
