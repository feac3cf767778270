//! Experiment harness for the `sbkrylov` solvers: TOML configs, method
//! runs over shift groups, per-iteration CSV histories, summary tables with
//! a block-cost multiplier, seed-variability studies and the
//! smooth-parameter recycling protocol.

pub mod config;
pub mod error;
pub mod inspect;
pub mod methods;
pub mod problem;
pub mod run;
pub mod smooth;
pub mod stats;
pub mod variability;

pub use config::ExperimentConfig;
pub use error::HarnessError;
pub use inspect::inspect;
pub use run::{run_experiment, Overrides, RunResult, SummaryRow};
pub use smooth::{run_smooth, SmoothResult};
pub use variability::{run_variability, VariabilityResult};
