//! Counter-based random streams.
//!
//! A stream is identified by `(master seed, stream index)`; positions inside
//! it are addressed by a counter measured in uniform draws. There is no
//! global generator, so any worker can reconstruct any stream position.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// ChaCha words consumed by one `f64` draw.
const WORDS_PER_UNIFORM: u128 = 2;

#[derive(Clone, Debug)]
pub struct RandomStream {
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        rng.set_word_pos(0);
        RandomStream { rng }
    }

    /// Stream positioned after `draws` uniforms have been consumed.
    pub fn at(seed: u64, index: u64, draws: u64) -> Self {
        let mut stream = Self::new(seed, index);
        stream.seek(draws);
        stream
    }

    pub fn seek(&mut self, draws: u64) {
        self.rng.set_word_pos(draws as u128 * WORDS_PER_UNIFORM);
    }

    /// Number of uniforms consumed so far.
    pub fn position(&self) -> u64 {
        (self.rng.get_word_pos() / WORDS_PER_UNIFORM) as u64
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Bernoulli draw; consumes exactly one uniform regardless of `p`.
    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }

    /// Uniform integer in `0..bound`; consumes exactly one uniform.
    pub fn below(&mut self, bound: usize) -> usize {
        debug_assert!(bound > 0);
        ((self.uniform() * bound as f64) as usize).min(bound - 1)
    }
}
