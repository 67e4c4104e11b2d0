use thiserror::Error;

/// Errors raised by state construction, channels, protocol runs and tomography.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix has {rows}x{cols} shape but {len} entries were supplied")]
    EntryCount { rows: usize, cols: usize, len: usize },

    #[error("qubit index {0} repeated")]
    RepeatedIndex(usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    IndexOutOfRange { index: usize, n_qubits: usize },

    #[error("partial trace needs at least one kept qubit")]
    EmptyKeep,

    #[error("dimension {0} is not a power of two")]
    NotQubitDimension(usize),

    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is {0}, expected 1")]
    BadTrace(f64),

    #[error("Kraus operators violate completeness (max deviation {0:e})")]
    Completeness(f64),

    #[error("channel has no operators")]
    EmptyChannel,

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("Bloch vector norm {0} exceeds 1")]
    BlochNorm(f64),

    #[error("{what} needs at least {min}, got {found}")]
    TooSmall {
        what: &'static str,
        min: usize,
        found: usize,
    },

    #[error("projection probability {0:e} is too small to renormalize")]
    VanishingProbability(f64),

    #[error("noise targets overlap on qubit {0}")]
    OverlappingTargets(usize),

    #[error("invalid noise schedule: {0}")]
    InvalidSchedule(String),

    #[error("reduced state has no support on the code space (weight {0:e})")]
    NoCodeSpaceSupport(f64),

    #[error("no Pauli correction restores branch {branch:?} (best fidelity {best})")]
    ByproductNotFound { branch: Vec<u8>, best: f64 },

    #[error("invalid tomography input: {0}")]
    Tomography(String),

    #[error("least-squares design matrix is singular")]
    SingularDesign,

    #[error("missing probe output for {0}")]
    MissingProbe(String),

    #[error("json: {0}")]
    Json(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}
