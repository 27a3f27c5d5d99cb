//! Seedable xorshift64* generator.
//!
//! All randomized corpora and trials in this workspace draw from this one
//! generator so outputs are reproducible bit-for-bit from a seed, and
//! portable: the full update rule is documented here.
//!
//! State update (Marsaglia xorshift with a multiplicative finalizer):
//!
//! ```text
//! s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;
//! output = s * 0x2545F4914F6CDD1D  (wrapping)
//! ```
//!
//! Uniform doubles take the top 53 bits of the output; Gaussian draws use the
//! Box-Muller transform on two uniforms (no rejection step, so the stream
//! position is a fixed function of the draw count).

/// xorshift64* stream. A zero seed is remapped to a fixed nonzero constant.
#[derive(Debug, Clone)]
pub struct XorShift64Star {
    state: u64,
}

impl XorShift64Star {
    pub fn new(seed: u64) -> Self {
        // xorshift state must be nonzero
        let state = if seed == 0 { 0x9E3779B97F4A7C15 } else { seed };
        Self { state }
    }

    /// Derives an independent stream for a sub-task (trial, sample, ...).
    /// The derivation is pure in (seed, index), so parallel schedules cannot
    /// change results.
    pub fn substream(seed: u64, index: u64) -> Self {
        let mixed = splitmix64(seed ^ index.wrapping_mul(0xA3EC647659359ACD));
        Self::new(mixed)
    }

    pub fn next_u64(&mut self) -> u64 {
        let mut s = self.state;
        s ^= s >> 12;
        s ^= s << 25;
        s ^= s >> 27;
        self.state = s;
        s.wrapping_mul(0x2545F4914F6CDD1D)
    }

    /// Uniform in [0, 1).
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in (0, 1]; safe as a logarithm argument.
    pub fn next_f64_open(&mut self) -> f64 {
        ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in [lo, hi).
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Standard normal via Box-Muller (consumes exactly two uniforms).
    pub fn gaussian(&mut self) -> f64 {
        let u1 = self.next_f64_open();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    pub fn normal(&mut self, mean: f64, std: f64) -> f64 {
        mean + std * self.gaussian()
    }

    /// Uniform integer in [0, n).
    pub fn below(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (self.next_f64() * n as f64) as usize % n
    }

    /// k distinct indices from [0, n), ascending order.
    pub fn sample_indices(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        // Floyd's algorithm
        let mut chosen = std::collections::BTreeSet::new();
        for j in (n - k)..n {
            let t = self.below(j + 1);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        chosen.into_iter().collect()
    }
}

/// splitmix64 finalizer, used only to spread substream seeds.
pub fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(0x9E3779B97F4A7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_seed() {
        let mut a = XorShift64Star::new(42);
        let mut b = XorShift64Star::new(42);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn zero_seed_is_usable() {
        let mut r = XorShift64Star::new(0);
        assert_ne!(r.next_u64(), 0);
    }

    #[test]
    fn uniform_range_and_moments() {
        let mut r = XorShift64Star::new(7);
        let n = 20000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = r.next_f64();
            assert!((0.0..1.0).contains(&x));
            sum += x;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn gaussian_moments() {
        let mut r = XorShift64Star::new(11);
        let n = 40000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = r.gaussian();
            s1 += x;
            s2 += x * x;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((var - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn sample_indices_distinct_and_sorted() {
        let mut r = XorShift64Star::new(3);
        for _ in 0..50 {
            let idx = r.sample_indices(20, 7);
            assert_eq!(idx.len(), 7);
            assert!(idx.windows(2).all(|w| w[0] < w[1]));
            assert!(idx.iter().all(|&i| i < 20));
        }
    }

    #[test]
    fn substreams_differ() {
        let mut a = XorShift64Star::substream(5, 0);
        let mut b = XorShift64Star::substream(5, 1);
        assert_ne!(a.next_u64(), b.next_u64());
    }
}
