//! Shared problem builders for the benchmarks.

use std::sync::Arc;

use sbkrylov::random::{rng, unit_columns};
use sbkrylov::{c64, generate_convection_diffusion, ShiftedFamily};

/// Convection–diffusion family on a `grid × grid` mesh with unrelated
/// unit right-hand sides.
pub fn family(grid: usize, convection: f64, shifts: &[f64], seed: u64) -> ShiftedFamily {
    let a = Arc::new(generate_convection_diffusion(grid, convection).expect("valid grid"));
    let rhs = unit_columns(&mut rng(seed), a.n_rows(), shifts.len());
    ShiftedFamily::new(a, shifts.iter().map(|&s| c64(s)).collect(), rhs).expect("valid family")
}

/// The shift set used throughout the experiments.
pub const SHIFTS: [f64; 4] = [1e-4, 2e-4, 1e-2, 2e-2];
