//! Small dense linear algebra used inside the Krylov methods.

mod eigen;
mod lsq;
mod lu;
mod qr;

pub use eigen::{eigenvalues, hessenberg_eigen, reduce_to_hessenberg, EigenOrdering, EigenPairs};
pub use lsq::{hessenberg_least_squares, ProgressiveLsq};
pub use lu::{condition_1, norm_1, solve_small_dense, Lu};
pub use qr::{householder_qr, qr_least_squares, rank_revealing_qr, solve_upper, QrFactors};
