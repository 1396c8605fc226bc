use thiserror::Error;

/// Errors surfaced by the spectral tomography toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} out of range (supported: 1..=3)")]
    QubitCount(usize),

    #[error("Kraus operators are not trace preserving (max deviation {0:.3e})")]
    NotTracePreserving(f64),

    #[error("top row of transfer matrix is not (1, 0, ..., 0) (max deviation {0:.3e})")]
    TopRow(f64),

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("matrix is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("eigensolver did not converge")]
    NoConvergence,

    #[error("negative rate {name} = {value}")]
    NegativeRate { name: &'static str, value: f64 },

    #[error("invalid pencil configuration: {0}")]
    PencilConfig(String),

    #[error("model order {order} is under-determined (sigma_N / sigma_1 = {ratio:.3e})")]
    UnderDetermined { order: usize, ratio: f64 },

    #[error("nonpositive residual degrees of freedom for model order {order} ({samples} samples)")]
    DegreesOfFreedom { order: usize, samples: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("missing (pauli, prep, k) settings: {0:?}")]
    MissingSettings(Vec<(usize, usize, usize)>),

    #[error("outcome probability {0:.3e} is negative (invalid channel)")]
    NegativeProbability(f64),

    #[error("unitarity constraints are infeasible for the given eigenvalue moduli")]
    Infeasible,

    #[error("{failed} of {total} bootstrap replicates failed to fit")]
    BootstrapFailures { failed: usize, total: usize },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
