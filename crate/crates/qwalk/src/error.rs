use thiserror::Error;

#[derive(Debug, Error)]
pub enum QwalkError {
    #[error("no connected graph found in {attempts} attempts (n={n}, p={p})")]
    ConnectivityExhausted { n: usize, p: f64, attempts: usize },

    #[error("cannot place {m} traps on {n} nodes")]
    TooManyTraps { m: usize, n: usize },

    #[error("eigensolver failed to converge ({context})")]
    NonConvergence { context: String },

    #[error("near-defective eigenspace: biorthogonality residual {residual:.3e} exceeds {limit:.3e}")]
    DefectivePencil { residual: f64, limit: f64 },

    #[error("matrix exponential step size underflow at t={t}")]
    StepSizeUnderflow { t: f64 },

    #[error("fit window holds {points} points, need at least {min}")]
    WindowTooSmall { points: usize, min: usize },

    #[error("survival values are not strictly positive on the fit window")]
    NonPositiveValues,

    #[error("curve horizon too short for plateau detection")]
    InsufficientHorizon,

    #[error("time grids differ: {0}")]
    GridMismatch(String),

    #[error("classical probability went negative beyond tolerance: {value:.3e}")]
    NegativeProbability { value: f64 },

    #[error("too many ensemble realizations failed: {failed}/{total}")]
    EnsembleFailure { failed: usize, total: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QwalkError>;
