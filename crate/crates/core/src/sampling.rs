//! Seeded test points with exact rational coordinates, so the same point is
//! reproduced at every precision of a ladder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rug::{Integer, Rational};

use crate::num::AppComplex;

const DENOM_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoint {
    pub re: Rational,
    pub im: Rational,
}

impl RationalPoint {
    pub fn embed(&self, prec: u32) -> AppComplex {
        AppComplex::from_rationals(prec, &self.re, &self.im)
    }
}

/// Re uniform in [-1/2, 1/2], Im uniform in [im_lo, im_hi], on a 2^-32 grid.
pub fn random_points(seed: u64, count: usize, im_lo: &Rational, im_hi: &Rational) -> Vec<RationalPoint> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let denom = Integer::from(1) << DENOM_BITS;
    let half = 1u64 << (DENOM_BITS - 1);
    let width = Rational::from(im_hi - im_lo);
    (0..count)
        .map(|_| {
            let kr: u64 = rng.gen_range(0..=(2 * half));
            let ki: u64 = rng.gen_range(0..=(1u64 << DENOM_BITS));
            let re = Rational::from((Integer::from(kr) - half, denom.clone()));
            let im = Rational::from((Integer::from(ki), denom.clone())) * &width + im_lo;
            RationalPoint { re, im }
        })
        .collect()
}

/// The default verification range: Im in [4/5, 3].
pub fn default_points(seed: u64, count: usize) -> Vec<RationalPoint> {
    random_points(seed, count, &Rational::from((4, 5)), &Rational::from(3))
}
