//! Counter-based Gaussian noise streams.
//!
//! Every trajectory/channel pair owns an independent ChaCha8 stream, and every
//! draw sits at a fixed counter position, so the value at `(seed, trajectory,
//! channel, position)` is a pure function of those four numbers. That makes
//! ensembles reproducible regardless of worker count or evaluation order, and
//! lets a reverse pass re-read exactly the randomness a forward pass consumed.
//!
//! Normal variates use Box-Muller rather than a rejection sampler on purpose:
//! rejection consumes a data-dependent number of words, which would break the
//! fixed position-to-value mapping.

// Needed for f64 math in the pure no_std graph; redundant (and flagged
// unused) whenever some enabled feature links std into the build.
#[allow(unused_imports)]
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Channel indices used across the crate. A single monitored channel reads
/// channel 0 forward and channel 3 in reverse; the depolarizing engines use
/// the two triples; protocols draw ancillary randomness from the later slots.
pub const CHANNEL_FORWARD: u32 = 0;
pub const CHANNEL_REVERSE: u32 = 3;
pub const CHANNEL_PROTOCOL: u32 = 6;
pub const CHANNEL_PARAMS: u32 = 7;

/// Identifies one logical noise source inside an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamId {
    pub trajectory: u64,
    pub channel: u32,
}

/// A deterministic Gaussian/uniform stream addressed by draw position.
///
/// Each position consumes exactly two 64-bit words (one ChaCha block holds
/// four positions), whether the draw is used as a normal or a uniform, so
/// seeking and sequential use land on identical values.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    rng: ChaCha8Rng,
    position: u64,
}

impl NoiseStream {
    pub fn new(seed: u64, id: StreamId) -> Self {
        debug_assert!(id.channel < 256, "channel must fit in 8 bits");
        debug_assert!(id.trajectory < 1 << 56, "trajectory must fit in 56 bits");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream((id.trajectory << 8) | u64::from(id.channel));
        rng.set_word_pos(0);
        NoiseStream { rng, position: 0 }
    }

    /// Index of the next draw.
    pub fn position(&self) -> u64 {
        self.position
    }

    /// Jump to an absolute draw position (four 32-bit words per position).
    pub fn seek(&mut self, position: u64) {
        self.rng.set_word_pos(u128::from(position) * 4);
        self.position = position;
    }

    fn next_pair(&mut self) -> (u64, u64) {
        let a = self.rng.next_u64();
        let b = self.rng.next_u64();
        self.position += 1;
        (a, b)
    }

    /// Uniform draw in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        let (a, _) = self.next_pair();
        to_unit_half_open(a)
    }

    /// Standard normal draw (Box-Muller, cosine branch).
    pub fn standard_normal(&mut self) -> f64 {
        let (a, b) = self.next_pair();
        let u1 = to_unit_open_closed(a);
        let u2 = to_unit_half_open(b);
        (-2.0 * u1.ln()).sqrt() * (core::f64::consts::TAU * u2).cos()
    }

    /// Wiener increment over a step of length `dt`.
    pub fn wiener_increment(&mut self, dt: f64) -> f64 {
        dt.sqrt() * self.standard_normal()
    }
}

/// 53-bit mantissa mapping onto `(0, 1]`; never returns 0, so `ln` is safe.
fn to_unit_open_closed(x: u64) -> f64 {
    ((x >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// 53-bit mantissa mapping onto `[0, 1)`.
fn to_unit_half_open(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn streams_are_pure_functions_of_their_address() {
        let mut a = NoiseStream::new(7, StreamId { trajectory: 3, channel: 1 });
        let draws: Vec<f64> = (0..32).map(|_| a.standard_normal()).collect();
        let mut b = NoiseStream::new(7, StreamId { trajectory: 3, channel: 1 });
        let again: Vec<f64> = (0..32).map(|_| b.standard_normal()).collect();
        assert_eq!(draws, again);
    }

    #[test]
    fn seek_reproduces_later_draws() {
        let id = StreamId { trajectory: 11, channel: 4 };
        let mut a = NoiseStream::new(42, id);
        let all: Vec<f64> = (0..64).map(|_| a.standard_normal()).collect();
        let mut b = NoiseStream::new(42, id);
        b.seek(40);
        assert_eq!(b.position(), 40);
        for (k, expect) in all[40..].iter().enumerate() {
            assert_eq!(b.standard_normal(), *expect, "draw {k}");
        }
    }

    #[test]
    fn uniform_and_normal_share_position_accounting() {
        // A uniform at position k must not shift where position k+1 lands.
        let id = StreamId { trajectory: 0, channel: 0 };
        let mut a = NoiseStream::new(9, id);
        a.standard_normal();
        let second = a.standard_normal();
        let mut b = NoiseStream::new(9, id);
        b.uniform();
        let second_after_uniform = b.standard_normal();
        assert_eq!(second, second_after_uniform);
    }

    #[test]
    fn distinct_channels_are_distinct_streams() {
        let mut a = NoiseStream::new(1, StreamId { trajectory: 5, channel: 0 });
        let mut b = NoiseStream::new(1, StreamId { trajectory: 5, channel: 3 });
        let xa: Vec<f64> = (0..8).map(|_| a.standard_normal()).collect();
        let xb: Vec<f64> = (0..8).map(|_| b.standard_normal()).collect();
        assert_ne!(xa, xb);
    }

    #[test]
    fn normal_moments_are_sane() {
        let mut s = NoiseStream::new(2024, StreamId { trajectory: 0, channel: 0 });
        let n = 200_000;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..n {
            let z = s.standard_normal();
            sum += z;
            sum_sq += z * z;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!(mean.abs() < 0.01, "mean {mean}");
        assert!((var - 1.0).abs() < 0.02, "var {var}");
    }
}
