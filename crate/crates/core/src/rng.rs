//! Seed schedule and the random streams consumed by the samplers.
//!
//! Every Monte Carlo path is seeded from `(master seed, path index)` alone, so
//! an estimate never depends on how paths are split across workers or shards.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::analytic::normal_quantile;
use crate::math;

/// SplitMix64 finalizer. A bijection on `u64`, so distinct inputs give
/// distinct outputs.
#[inline]
pub fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of shard or resample `index` under `master`: `master ⊕ mix(index)`.
#[inline]
pub fn derive_seed(master: u64, index: u64) -> u64 {
    master ^ mix(index)
}

/// Clock and deviate seeds of annealed path `path` (fresh clocks per path).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PathSeeds {
    pub clock: u64,
    pub deviate: u64,
}

impl PathSeeds {
    pub fn for_path(master: u64, path: u64) -> Self {
        Self {
            clock: derive_seed(master, path.wrapping_mul(2)),
            deviate: derive_seed(master, path.wrapping_mul(2).wrapping_add(1)),
        }
    }
}

const TWO_POW_M53: f64 = 1.0 / 9_007_199_254_740_992.0;

/// A reproducible random stream (xoshiro256++).
#[derive(Debug, Clone)]
pub struct Stream {
    rng: Xoshiro256PlusPlus,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on the open interval (0, 1), on the midpoints of a 2^-53 grid.
    #[inline]
    pub fn uniform(&mut self) -> f64 {
        ((self.next_u64() >> 11) as f64 + 0.5) * TWO_POW_M53
    }

    /// Standard normal deviate by inversion of the Gaussian distribution
    /// function. Exactly one `u64` is consumed per deviate.
    #[inline]
    pub fn normal(&mut self) -> f64 {
        normal_quantile(self.uniform())
    }

    /// Standard exponential deviate by inversion.
    #[inline]
    pub fn exponential(&mut self) -> f64 {
        -math::ln(self.uniform())
    }

    /// Uniform integer in `0..n` (Lemire's multiply-and-reject). `n > 0`.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        debug_assert!(n > 0);
        let mut m = (self.next_u64() as u128) * (n as u128);
        let mut low = m as u64;
        if low < n {
            let threshold = n.wrapping_neg() % n;
            while low < threshold {
                m = (self.next_u64() as u128) * (n as u128);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn derived_seeds_are_distinct() {
        let seeds: HashSet<u64> = (0..10_000).map(|i| derive_seed(42, i)).collect();
        assert_eq!(seeds.len(), 10_000);
        let s = PathSeeds::for_path(7, 3);
        assert_ne!(s.clock, s.deviate);
    }

    #[test]
    fn uniform_stays_inside_open_interval() {
        let mut s = Stream::new(1);
        for _ in 0..100_000 {
            let u = s.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn below_is_roughly_uniform() {
        let mut s = Stream::new(9);
        let mut counts = [0u32; 7];
        let draws = 70_000;
        for _ in 0..draws {
            counts[s.below(7) as usize] += 1;
        }
        for c in counts {
            assert!((c as f64 - 10_000.0).abs() < 5.0 * 10_000f64.sqrt());
        }
    }

    #[test]
    fn streams_are_deterministic() {
        let a: std::vec::Vec<f64> = {
            let mut s = Stream::new(123);
            (0..5).map(|_| s.normal()).collect()
        };
        let mut s = Stream::new(123);
        for x in a {
            assert_eq!(x.to_bits(), s.normal().to_bits());
        }
    }
}
