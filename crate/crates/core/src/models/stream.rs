//! Counter-based random streams.
//!
//! A stream is keyed by a master seed and addressed by a path of indices
//! (e.g. `[replication]`). The underlying generator is ChaCha8: the seed selects
//! the key, the hashed path selects the 64-bit stream id, and draws are read at
//! increasing block-counter positions. Draw `r` on path `q` is therefore a pure
//! function of `(master_seed, q, r)`, whatever thread consumes it.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, Gamma};

#[derive(Debug, Clone)]
pub struct RandomStream {
    master_seed: u64,
    path: Vec<u64>,
    rng: ChaCha8Rng,
}

// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn stream_id(path: &[u64]) -> u64 {
    path.iter()
        .fold(mix(path.len() as u64), |acc, &i| mix(acc ^ mix(i)))
}

impl RandomStream {
    /// Root stream (empty path) for `master_seed`.
    pub fn new(master_seed: u64) -> Self {
        Self::at_path(master_seed, Vec::new())
    }

    fn at_path(master_seed: u64, path: Vec<u64>) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id(&path));
        Self {
            master_seed,
            path,
            rng,
        }
    }

    /// Fresh stream at `path ++ [index]`, positioned at draw 0.
    pub fn child(&self, index: u64) -> Self {
        let mut path = self.path.clone();
        path.push(index);
        Self::at_path(self.master_seed, path)
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn path(&self) -> &[u64] {
        &self.path
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform draw on the open interval `(0, 1)`; never returns 0 or 1.
    pub fn open01(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    /// Standard exponential draw.
    pub fn exp1(&mut self) -> f64 {
        self.rng.sample(Exp1)
    }

    /// Gamma(shape, 1) draw. `shape` must be positive.
    pub fn gamma(&mut self, shape: f64) -> f64 {
        let dist = Gamma::new(shape, 1.0).expect("gamma shape must be positive and finite");
        self.rng.sample(dist)
    }
}
