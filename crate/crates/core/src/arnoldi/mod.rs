//! Arnoldi processes: single-vector, block, and block projected against a
//! recycle space.

mod angles;
mod block;
mod single;

pub use angles::subspace_equality_angle;
pub use block::{block_arnoldi, block_arnoldi_with, BlockArnoldiOptions, BlockArnoldiState, Replacement};
pub use single::{arnoldi_extend, ArnoldiState, BREAKDOWN_TOL};
