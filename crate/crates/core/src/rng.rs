//! Counter-addressable random streams.
//!
//! Every `(seed, replica, level, lane)` names an independent ChaCha8 stream.
//! Step `t` of a sampler reads exactly three variates at a fixed offset, so a
//! variate is a pure function of `(seed, stream, t)` and every branch consumes
//! the same budget.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ChaCha words consumed per step: three `u64` draws.
const WORDS_PER_STEP: u128 = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lane {
    Step = 0,
    Init = 1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub replica: u64,
    pub level: u32,
    pub lane: Lane,
}

impl StreamId {
    pub fn new(replica: u64, level: usize, lane: Lane) -> Self {
        StreamId {
            replica,
            level: level as u32,
            lane,
        }
    }

    fn word(&self) -> u64 {
        assert!(self.replica < 1 << 40, "replica index too large");
        assert!(self.level < 1 << 23, "level index too large");
        (self.replica << 24) | ((self.level as u64) << 1) | self.lane as u64
    }
}

/// The three uniforms of one step: move type, proposal, acceptance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepVariates {
    pub kind: f64,
    pub proposal: f64,
    pub accept: f64,
}

/// Uniform in `[0, 1)` from the top 53 bits.
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[derive(Debug, Clone)]
pub struct RngStream {
    rng: ChaCha8Rng,
    /// Step whose variates start at the current word position, if aligned.
    next_step: Option<u64>,
}

impl RngStream {
    pub fn new(seed: u64, id: StreamId) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(id.word());
        RngStream {
            rng,
            next_step: Some(0),
        }
    }

    /// Variates of step `t`; sequential access avoids seeking.
    pub fn step(&mut self, t: u64) -> StepVariates {
        if self.next_step != Some(t) {
            self.rng.set_word_pos(WORDS_PER_STEP * t as u128);
        }
        let v = StepVariates {
            kind: unit_f64(self.rng.next_u64()),
            proposal: unit_f64(self.rng.next_u64()),
            accept: unit_f64(self.rng.next_u64()),
        };
        self.next_step = Some(t + 1);
        v
    }

    /// Next uniform in `[0, 1)` outside the step discipline.
    pub fn uniform(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.next_step = None;
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.next_step = None;
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.next_step = None;
        self.rng.fill_bytes(dst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_access_matches_sequential() {
        let id = StreamId::new(3, 1, Lane::Step);
        let mut seq = RngStream::new(42, id);
        let all: Vec<_> = (0..50).map(|t| seq.step(t)).collect();
        let mut jump = RngStream::new(42, id);
        for t in [17u64, 3, 49, 0, 18] {
            assert_eq!(jump.step(t), all[t as usize]);
        }
    }

    #[test]
    fn streams_differ() {
        let a = RngStream::new(1, StreamId::new(0, 0, Lane::Step)).step(0);
        let b = RngStream::new(1, StreamId::new(0, 1, Lane::Step)).step(0);
        let c = RngStream::new(1, StreamId::new(0, 0, Lane::Init)).step(0);
        let d = RngStream::new(2, StreamId::new(0, 0, Lane::Step)).step(0);
        assert!(a != b && a != c && a != d);
    }

    #[test]
    fn unit_range() {
        assert_eq!(unit_f64(0), 0.0);
        assert!(unit_f64(u64::MAX) < 1.0);
    }
}
