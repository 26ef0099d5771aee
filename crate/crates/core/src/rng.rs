//! Seeded stream shared by the generators and candidate sampling.
//!
//! xoshiro256** seeded through SplitMix64 (`Xoshiro256StarStar::seed_from_u64`).
//! Uniform reals are `(next_u64 >> 11) * 2^-53`; bounded integers use
//! Lemire's multiply-shift with rejection.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

pub(crate) struct Stream(Xoshiro256StarStar);

impl Stream {
    pub(crate) fn new(seed: u64) -> Self {
        Stream(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub(crate) fn uniform(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub(crate) fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let mut wide = u128::from(self.0.next_u64()) * u128::from(bound);
        let mut low = wide as u64;
        if low < bound {
            let threshold = bound.wrapping_neg() % bound;
            while low < threshold {
                wide = u128::from(self.0.next_u64()) * u128::from(bound);
                low = wide as u64;
            }
        }
        (wide >> 64) as u64
    }
}
