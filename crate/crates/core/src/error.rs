use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mode count {0}: at least one mode is required")]
    InvalidModeCount(usize),

    #[error("{photons} photons cannot occupy {modes} modes with at most one photon each")]
    TooManyPhotons { modes: usize, photons: usize },

    #[error("negative occupation {value} in mode {mode}")]
    NegativeOccupation { mode: usize, value: i64 },

    #[error("occupation vector {0:?} is not a member of the basis")]
    NotInBasis(Vec<u32>),

    #[error("mode index {index} out of range 1..={modes}")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("beam splitter modes must satisfy a < b, got ({a}, {b})")]
    InvalidSplitterPair { a: usize, b: usize },

    #[error("non-finite angle {0}")]
    NonFiniteAngle(f64),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("kept modes must be two distinct modes, got ({0}, {1})")]
    InvalidKeepPair(usize, usize),

    #[error("zero channels must be strictly increasing and within 1..={modes}: {channels:?}")]
    InvalidChannels { modes: usize, channels: Vec<usize> },

    #[error("a NOON target needs at least one photon")]
    EmptyNoon,

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("non-physical value: {0}")]
    NonPhysical(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("unknown target column {0}")]
    MissingColumn(String),

    #[error("network document: {0}")]
    Parse(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
