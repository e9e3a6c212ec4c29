use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice dimension must be at least 1")]
    ZeroDimension,
    #[error("point has {found} coordinates, lattice has dimension {expected}")]
    Arity { expected: usize, found: usize },
    #[error("translate leaves the monoid N^d")]
    TranslateOutOfMonoid,
    #[error("pattern domain is not a box F_n")]
    NotABoxDomain,
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("invalid forbidden pattern #{index}: {reason}")]
    InvalidForbidden { index: usize, reason: String },
    #[error("empty subshift at n={n} (margin {margin})")]
    EmptySubshiftSuspected { n: i64, margin: i64 },
    #[error("operation requires a one-dimensional subshift, got d={0}")]
    NotOneDimensional(usize),
    #[error("operation requires a two-dimensional subshift, got d={0}")]
    NotTwoDimensional(usize),
    #[error("empty subshift: transfer matrix has spectral radius zero")]
    ZeroMatrix,
    #[error("transfer matrix is reducible")]
    Reducible,
    #[error("power iteration did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("strip width {width} is too narrow (minimum {min})")]
    StripTooNarrow { width: usize, min: usize },
    #[error("box F_{n} cannot hold a dictionary pattern of extent {extent}")]
    BoxTooSmall { n: i64, extent: i64 },
    #[error("invalid dictionary: {0}")]
    InvalidDictionary(String),
    #[error("packing does not meet the epsilon bounds")]
    BoundsViolated,
    #[error("malformed encoding: {0}")]
    MalformedEncoding(String),
    #[error("point source restrictions disagree between n={smaller} and n={larger}")]
    InconsistentPointSource { smaller: i64, larger: i64 },
    #[error("invalid Markov measure: {0}")]
    InvalidMeasure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
