use crate::C64;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid sparse structure: {0}")]
    InvalidStructure(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("triangular factor is singular at column {column}")]
    SingularFactor { column: usize },

    #[error("matrix is singular to working precision (pivot {pivot:e} at column {column})")]
    NearSingular { column: usize, pivot: f64 },

    #[error("QR iteration failed to converge after {sweeps} sweeps ({converged} eigenvalues found)")]
    EigenNoConvergence {
        sweeps: usize,
        converged: usize,
        partial: Vec<C64>,
    },

    #[error("invalid shifted family: {0}")]
    InvalidFamily(String),

    #[error("residual column {0} is zero")]
    ZeroColumn(usize),

    #[error("initial residuals are not collinear (columns {first} and {second}, sine {sine:e})")]
    NotCollinear {
        first: usize,
        second: usize,
        sine: f64,
    },

    #[error("collinearity system is singular for shift {shift} (index {index})")]
    CollinearitySystemSingular { index: usize, shift: C64 },

    #[error("oblique projector for shift {shift} is ill-conditioned (condition {condition:e}); refresh the recycle space")]
    ObliqueProjectorSingular { shift: C64, condition: f64 },

    #[error("recycle space lies numerically inside span[W C] (smallest N diagonal {smallest:e}); reduce k")]
    RankDeficientAugmentation { smallest: f64 },

    #[error("residuals remain collinear after {attempts} attempts")]
    PersistentCollinearity { attempts: usize },

    #[error("block Arnoldi total breakdown at step {step}: every candidate column is dependent and no replacement could be made")]
    TotalBreakdown { step: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
