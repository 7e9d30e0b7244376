//! Deterministic RNG plumbing: ChaCha8 substreams and a fast hash map.
//!
//! Every worker derives its generators from `(seed, stream)` where `stream`
//! is the replica index. ChaCha streams are disjoint by construction, so
//! replica outputs never collide and results are reproducible regardless of
//! thread scheduling. The algorithm name recorded in CSV metadata is
//! [`RNG_ALGORITHM`].

use std::hash::{BuildHasherDefault, Hasher};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Name echoed into output metadata.
pub const RNG_ALGORITHM: &str = "ChaCha8 (64-bit seed, per-replica streams)";

/// Generator for stream `stream` of the seed `seed`.
///
/// Each worker uses two streams: an even one for its event clocks and
/// direction draws, an odd one owned by its `Environment` for edge states.
/// [`worker_rngs`] performs that split; callers that need a single stream
/// (tests, estimator calibration) use this directly.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// (event rng, environment rng) pair for replica `replica`.
pub fn worker_rngs(seed: u64, replica: u64) -> (ChaCha8Rng, ChaCha8Rng) {
    (substream(seed, 2 * replica), substream(seed, 2 * replica + 1))
}

/// Exponential waiting time with the given rate.
#[inline]
pub fn exp_time<R: Rng + ?Sized>(rng: &mut R, rate: f64) -> f64 {
    debug_assert!(rate > 0.0);
    // random::<f64>() is in [0,1), so the argument of ln is in (0,1].
    -(1.0 - rng.random::<f64>()).ln() / rate
}

/// Bernoulli draw via a single uniform.
#[inline]
pub fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    rng.random::<f64>() < p
}

/// FxHash (the rustc hash): multiply-xor, good enough for lattice keys and
/// several times faster than SipHash in the event loop.
#[derive(Default)]
pub struct FxHasher64 {
    hash: u64,
}

const FX_SEED: u64 = 0x51_7c_c1_b7_27_22_0a_95;

impl Hasher for FxHasher64 {
    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.write_u64(b as u64);
        }
    }

    #[inline]
    fn write_u64(&mut self, n: u64) {
        self.hash = (self.hash.rotate_left(5) ^ n).wrapping_mul(FX_SEED);
    }

    #[inline]
    fn write_u8(&mut self, n: u8) {
        self.write_u64(n as u64);
    }

    #[inline]
    fn write_i64(&mut self, n: i64) {
        self.write_u64(n as u64);
    }

    #[inline]
    fn write_usize(&mut self, n: usize) {
        self.write_u64(n as u64);
    }

    #[inline]
    fn finish(&self) -> u64 {
        self.hash
    }
}

pub type FxBuildHasher = BuildHasherDefault<FxHasher64>;
pub type FxHashMap<K, V> = std::collections::HashMap<K, V, FxBuildHasher>;
