//! Reference solvers: restarted GMRES/FOM for one system, and the shifted
//! sGMRES/sFOM methods that rely on collinear residuals.

mod collinear;
mod single;

pub use collinear::{sfom_simoncini, sgmres_frommer, BaseShift};
pub use single::{fom_restarted, gmres_restarted};
pub(crate) use single::fom_coefficients;
