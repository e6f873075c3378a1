//! Counter-based splittable random streams.
//!
//! A stream is keyed by `(seed, stream id)`. The key is
//! `mix64(seed ^ mix64(stream + GAMMA))`, and draw `i` (1-based) is
//! `mix64(key + i * GAMMA)` with wrapping arithmetic, where `GAMMA` is
//! `0x9E3779B97F4A7C15` and `mix64` is the SplitMix64 finalizer:
//!
//! ```text
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! z ^ (z >> 31)
//! ```
//!
//! Children are derived from the parent's identity only, never from its
//! draw position: `split(i)` keeps the seed and uses stream id
//! `mix64(stream ^ mix64(i * GAMMA + 1))`. Only integer operations are
//! involved up to `next_f64`, so sequences are identical on every platform.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    state: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self {
            seed,
            stream,
            state: mix64(seed ^ mix64(stream.wrapping_add(GAMMA))),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Independent child stream; depends only on `(seed, stream, index)`.
    pub fn split(&self, index: u64) -> RngStream {
        let child = mix64(self.stream ^ mix64(index.wrapping_mul(GAMMA).wrapping_add(1)));
        RngStream::new(self.seed, child)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `0..n` without modulo bias. `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let x = self.next_u64();
            if x < zone {
                return x % n;
            }
        }
    }

    /// Standard normal draw (Box-Muller, cosine branch only).
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}
