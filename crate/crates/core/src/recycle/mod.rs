//! Subspace recycling: a retained space `𝒰` with image `C = A U`, the
//! projectors it induces, the shifted augmented Arnoldi relation, and the
//! recycled solvers built on them.

mod augmented;
mod project;
mod ritz;
mod solver;
mod space;

pub use augmented::{build_augmented_operator, AugmentedShiftOperator, AUGMENTATION_RANK_TOL};
pub use project::{oblique_project_shift, orthogonal_residual_projection, OBLIQUE_CONDITION_LIMIT};
pub use ritz::{update_recycle_space, RecycleUpdate, RitzSource};
pub use solver::{rgmres_baseline, rsbgmres, rsbgmres_cycle, AugmentedCycle, RecycleConfig};
pub use space::{Provenance, RecycleSpace};
