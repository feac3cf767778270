//! Krylov subspace solvers for families of shifted linear systems
//! `(A + σᵢ I) xᵢ = bᵢ`, `i = 1..L`.
//!
//! The family is treated as one Sylvester equation `A X + X D = B` with
//! `D = diag(σ₁, …, σ_L)`. Because the block Krylov subspace generated by the
//! Sylvester operator does not depend on `D`, every shifted system can be
//! solved over one block Krylov subspace built from the block of residuals,
//! without requiring the residuals to be collinear. This crate provides:
//!
//! * sparse storage, Matrix Market I/O and a convection–diffusion generator
//!   ([`sparse`], [`mm`], [`generate`]);
//! * small dense kernels ([`kernels`]);
//! * single-vector and block Arnoldi processes ([`arnoldi`]);
//! * restarted GMRES/FOM and the collinear-residual shifted baselines
//!   ([`baseline`]);
//! * shifted block GMRES/FOM ([`shifted`]);
//! * recycled shifted block GMRES and single-system recycled GMRES
//!   ([`recycle`]).

pub mod arnoldi;
pub mod baseline;
mod common;
pub mod dense;
pub mod error;
pub mod family;
pub mod generate;
pub mod kernels;
pub mod mm;
pub mod random;
pub mod recycle;
pub mod report;
pub mod shifted;
pub mod sparse;

pub use num_complex::Complex64 as C64;

pub use arnoldi::{
    arnoldi_extend, block_arnoldi, subspace_equality_angle, ArnoldiState, BlockArnoldiState,
    Replacement,
};
pub use baseline::{fom_restarted, gmres_restarted, sfom_simoncini, sgmres_frommer, BaseShift};
pub use dense::DenseBlock;
pub use error::{Error, Result};
pub use family::ShiftedFamily;
pub use generate::generate_convection_diffusion;
pub use kernels::{
    hessenberg_eigen, hessenberg_least_squares, householder_qr, rank_revealing_qr,
    solve_small_dense, EigenOrdering, EigenPairs, QrFactors,
};
pub use mm::{read_dense_block, read_matrix_market, write_dense_block, write_matrix_market};
pub use recycle::{
    build_augmented_operator, oblique_project_shift, orthogonal_residual_projection,
    rgmres_baseline, rsbgmres, rsbgmres_cycle, update_recycle_space, AugmentedShiftOperator, Provenance,
    RecycleConfig, RecycleSpace, RecycleUpdate, RitzSource,
};
pub use report::{IterationRecord, SolveReport, SolverConfig};
pub use shifted::{
    decollinearize, detect_collinear, sbfom, sbgmres, DecollinearizeStrategy, StrategyKind,
};
pub use sparse::SparseMatrix;

/// Shorthand for a real number embedded as a complex scalar.
#[inline]
pub fn c64(re: f64) -> C64 {
    C64::new(re, 0.0)
}
