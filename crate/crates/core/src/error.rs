use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("duplicate cell id `{0}`")]
    DuplicateId(String),
    #[error("unknown cell id `{0}`")]
    UnknownId(String),
    #[error("cell index {0} out of range")]
    BadIndex(usize),
    #[error("not a tree: {0}")]
    NotATree(String),
    #[error("malformed planar tree: {0}")]
    MalformedPlanar(String),
    #[error("truncation level {level} exceeds tree height {height}")]
    TruncationTooDeep { level: usize, height: usize },
    #[error("invalid globular map: {0}")]
    InvalidMap(String),
    #[error("a 0-cell has no faces")]
    NoFaceAtDimZero,
    #[error("incompatible tree-of-trees assignment: {0}")]
    IncompatibleAssignment(String),
    #[error("result tree has {cells} cells, exceeding the bound {bound}")]
    TruncationOverflow { cells: usize, bound: usize },
    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),
    #[error("dimension {requested} exceeds the truncation dimension {limit}")]
    DimensionExceeded { requested: usize, limit: usize },
    #[error("tree bound {requested} exceeds the operad's tree bound {limit}")]
    TreeBoundExceeded { requested: usize, limit: usize },
    #[error("operad data is inconsistent: {0}")]
    InconsistentOperad(String),
    #[error("linear tree {0} has no boundary-extension map")]
    LinearTree(String),
    #[error("morphism is not in the action table: {0}")]
    MissingAction(String),
    #[error("ill-formed term: {0}")]
    IllFormedTerm(String),
    #[error("non-parallel pair: {0}")]
    NonParallel(String),
    #[error("bounds must be at least 1")]
    EmptyBounds,
    #[error("no filler found: {0}")]
    NoFiller(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
