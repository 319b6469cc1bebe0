use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("a pair needs two distinct vertices, got {0} twice")]
    SelfPair(usize),

    #[error("positions {0} and {1} coincide; configurations must be injective")]
    NotInjective(usize, usize),

    #[error("circle position {0} outside [0, 1)")]
    CirclePositionOutOfRange(String),

    #[error("probability {0} outside [0, 1]")]
    InvalidProbability(String),

    #[error("duplicate witness index {0}")]
    DuplicateWitness(usize),

    #[error("distance {0} must be strictly positive")]
    NonPositiveDistance(String),

    #[error("distance {0} exceeds 1/2, impossible on the unit circle")]
    DistanceExceedsHalf(String),

    #[error("negative edge weight {0}")]
    NegativeWeight(String),

    #[error("measurements are inconsistent at pair ({i}, {j})")]
    InconsistentInput { i: usize, j: usize },

    #[error("vertex set is not independent: {0} and {1} are adjacent")]
    NotIndependent(usize, usize),

    #[error("need at least {needed} vertices, got {got}")]
    TooFewVertices { needed: usize, got: usize },

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("vertex count {0} is not a multiple of 4")]
    NotMultipleOfFour(usize),

    #[error("expected a full distance table, pair ({0}, {1}) is missing")]
    MissingPair(usize, usize),

    #[error("vertex sets differ in size ({0} vs {1})")]
    SizeMismatch(usize, usize),

    #[error("operation requires a configuration on the line")]
    NotOnLine,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Attaches a 1-based line number to a parse error.
    pub fn at_line(self, line: usize) -> Error {
        match self {
            Error::Parse { message, .. } => Error::Parse { line, message },
            other => Error::Parse { line, message: other.to_string() },
        }
    }
}
