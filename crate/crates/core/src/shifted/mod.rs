//! Shifted block GMRES and FOM: all shifted systems are solved over one
//! block Krylov subspace built from the block of residuals.

mod block;
mod collinear;

pub(crate) use block::{arnoldi_options, end_of_cycle, plain_cycle, prepare, BlockSolve, Projection};
pub use block::{sbfom, sbfom_coefficients, sbgmres, sbgmres_coefficients};
pub use collinear::{
    collinearity_sines, decollinearize, detect_collinear, sine_between, DecollinearizeStrategy, StrategyKind,
    COLLINEAR_TOL,
};
