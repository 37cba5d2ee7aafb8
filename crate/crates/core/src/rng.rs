//! Splittable, counter-style random streams.
//!
//! A [`RandomSource`] is identified by `(seed, stream)`. Two sources with the
//! same pair produce the same draws. Monte-Carlo trials obtain their own
//! stream through [`RandomSource::fork`], so parallel scheduling never changes
//! results.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    stream: u64,
    inner: ChaCha8Rng,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl RandomSource {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { seed, stream, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// A fresh source on a child stream. Depends only on `(seed, stream, child)`,
    /// never on how many draws the parent has made.
    pub fn fork(&self, child: u64) -> Self {
        let s = splitmix(splitmix(self.stream ^ 0x5851_f42d_4c95_7f2d).wrapping_add(child));
        Self::new(self.seed, s)
    }

    /// Fork along a path of indices (e.g. `[cell, trial]`).
    pub fn fork_path(&self, path: &[u64]) -> Self {
        path.iter().fold(self.clone(), |r, &c| r.fork(c))
    }
}

impl RngCore for RandomSource {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
