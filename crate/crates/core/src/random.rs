//! Seeded pseudo-random data. Every random draw in the crate goes through
//! here so that a seed fully determines a run.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dense::{norm2, scale, DenseBlock};
use crate::{c64, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real standard-normal vector embedded in ℂⁿ.
pub fn normal_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    (0..n).map(|_| c64(rng.sample(StandardNormal))).collect()
}

/// Real standard-normal vector scaled to unit 2-norm.
pub fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<C64> {
    let mut v = normal_vector(rng, n);
    let nrm = norm2(&v);
    if nrm > 0.0 {
        scale(c64(1.0 / nrm), &mut v);
    }
    v
}

pub fn normal_block(rng: &mut impl Rng, n_rows: usize, n_cols: usize) -> DenseBlock {
    let entries = (0..n_rows * n_cols).map(|_| c64(rng.sample(StandardNormal))).collect();
    DenseBlock::from_col_major(n_rows, n_cols, entries).expect("length matches")
}

/// Block whose columns are independent unit-norm normal vectors.
pub fn unit_columns(rng: &mut impl Rng, n_rows: usize, n_cols: usize) -> DenseBlock {
    let mut b = DenseBlock::zeros(n_rows, n_cols);
    for j in 0..n_cols {
        b.set_col(j, &unit_vector(rng, n_rows));
    }
    b
}

/// Seed for the `index`-th derived stream of `base`; keeps related draws
/// independent without sharing one generator across call sites.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = base ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
