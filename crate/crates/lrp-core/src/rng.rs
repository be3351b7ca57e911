//! Counter-based random streams.
//!
//! Every draw is a pure function of `(master seed, derivation words, counter)`,
//! so any worker can reproduce any stream without shared state. Couplings rely
//! on this: the same canonical pair key yields the same uniform in every mode
//! and every ladder rung.

const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn combine(key: u64, word: u64) -> u64 {
    mix64(key ^ word.wrapping_mul(GAMMA).wrapping_add(0x2545_f491_4f6c_dd1d))
}

/// Master seed from which all streams are derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Seed(pub u64);

impl Seed {
    /// Derive a stream key from a list of words (domain tag, replica, vertex, ...).
    pub fn key(&self, words: &[u64]) -> u64 {
        let mut k = mix64(self.0 ^ 0x6a09_e667_f3bc_c908);
        for (i, w) in words.iter().enumerate() {
            k = combine(k, w.wrapping_add(i as u64));
        }
        k
    }

    pub fn stream(&self, words: &[u64]) -> Stream {
        Stream::new(self.key(words))
    }

    /// One keyed uniform in (0,1); used for per-pair edge decisions.
    pub fn keyed_uniform(&self, words: &[u64]) -> f64 {
        u64_to_unit(mix64(self.key(words).wrapping_add(GAMMA)))
    }
}

/// Convert a u64 to a double in the open interval (0,1).
#[inline]
pub fn u64_to_unit(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Sequential stream over a fixed key.
#[derive(Debug, Clone)]
pub struct Stream {
    key: u64,
    counter: u64,
}

impl Stream {
    pub fn new(key: u64) -> Self {
        Stream { key, counter: 0 }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let c = self.counter;
        self.counter += 1;
        mix64(self.key.wrapping_add(c.wrapping_add(1).wrapping_mul(GAMMA)))
    }

    /// Uniform in the open interval (0,1).
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        u64_to_unit(self.next_u64())
    }

    /// Uniform in (-h, h).
    #[inline]
    pub fn uniform_sym(&mut self, h: f64) -> f64 {
        (2.0 * self.uniform() - 1.0) * h
    }

    /// Exp(1) variate.
    #[inline]
    pub fn exp(&mut self) -> f64 {
        -(self.uniform()).ln()
    }

    /// Uniform integer in `0..n`.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        // 128-bit multiply rejection-free map; bias < 2^-64, irrelevant here.
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Poisson variate by the multiplication method (exact, O(mean)).
    pub fn poisson(&mut self, mean: f64) -> u64 {
        if mean <= 0.0 {
            return 0;
        }
        // Split large means to avoid exp underflow.
        if mean > 500.0 {
            let half = mean / 2.0;
            return self.poisson(half) + self.poisson(mean - half);
        }
        let limit = (-mean).exp();
        let mut prod = self.uniform();
        let mut k = 0u64;
        while prod > limit {
            prod *= self.uniform();
            k += 1;
        }
        k
    }
}

/// 64-bit hash of a byte slice; used to fingerprint configs for checkpoints.
pub fn hash_bytes(bytes: &[u8]) -> u64 {
    let mut k = 0xcbf2_9ce4_8422_2325u64;
    for chunk in bytes.chunks(8) {
        let mut w = [0u8; 8];
        w[..chunk.len()].copy_from_slice(chunk);
        k = combine(k, u64::from_le_bytes(w));
    }
    mix64(k)
}
