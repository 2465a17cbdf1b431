use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode {mode} out of range for {modes} modes")]
    ModeOutOfRange { mode: usize, modes: usize },

    #[error("beam splitter needs two distinct modes, got {0} twice")]
    SameModes(usize),

    #[error("duplicate source on mode {0}")]
    DuplicateSource(usize),

    #[error("duplicate herald on mode {0}")]
    DuplicateHerald(usize),

    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),

    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),

    #[error("phase angle must be finite, got {0}")]
    NonFiniteAngle(f64),

    #[error("parameter `{0}` is not declared")]
    UndeclaredParameter(String),

    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),

    #[error("heralds demand {demanded} photons but the circuit carries {available}")]
    HeraldExceedsPhotons { demanded: usize, available: usize },

    #[error("vector {0:?} is not in the basis")]
    NotInBasis(Vec<usize>),

    #[error("index {index} out of range for basis of size {size}")]
    IndexOutOfRange { index: usize, size: usize },

    #[error("states live on different bases")]
    BasisMismatch,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("photon number mismatch: input carries {input}, output carries {output}")]
    PhotonNumberMismatch { input: usize, output: usize },

    #[error("{photons} photons exceed the engine limit of {limit}")]
    PhotonLimit { photons: usize, limit: usize },

    #[error("{modes} modes exceed the engine limit of {limit}")]
    ModeLimit { modes: usize, limit: usize },

    #[error("cannot normalize a zero state")]
    ZeroNorm,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("herald outcome has zero probability")]
    ZeroProbability,

    #[error("scan needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    #[error("grid is not uniform over a full period")]
    NonUniformGrid,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
}

pub type Result<T> = std::result::Result<T, Error>;
