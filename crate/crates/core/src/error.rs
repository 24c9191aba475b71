use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures while decoding a tensor file.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("file too short for the 8-byte header length ({0} bytes)")]
    TruncatedHeaderLength(usize),
    #[error("declared header length {declared} exceeds file size {available}")]
    HeaderLength { declared: u64, available: usize },
    #[error("header is not valid UTF-8 text: {0}")]
    HeaderEncoding(String),
    #[error("header is not a valid metadata document: {0}")]
    HeaderSyntax(String),
    #[error("tensor `{name}`: {reason}")]
    InvalidEntry { name: String, reason: String },
    #[error("tensor `{name}`: unsupported dtype `{dtype}` (only F32 and F64)")]
    UnsupportedDtype { name: String, dtype: String },
    #[error("tensor `{name}`: data offsets [{begin}, {end}) out of bounds for payload of {payload} bytes")]
    OffsetOutOfBounds {
        name: String,
        begin: u64,
        end: u64,
        payload: usize,
    },
    #[error("tensors `{first}` and `{second}` have overlapping data ranges")]
    OverlappingOffsets { first: String, second: String },
    #[error("tensor `{name}`: {expected} bytes expected from shape, data range holds {actual}")]
    SizeMismatch {
        name: String,
        expected: u64,
        actual: u64,
    },
    #[error("layer_order metadata: {0}")]
    LayerOrder(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid tensor `{name}`: {reason}")]
    InvalidTensor { name: String, reason: String },
    #[error("duplicate tensor name `{0}`")]
    DuplicateName(String),
    #[error("tensor `{name}` has {ndim} dimension(s); at least 2 are required")]
    TooFewDims { name: String, ndim: usize },
    #[error("matrix order {0} is below the minimum of 2")]
    OrderTooSmall(usize),
    #[error("ensemble has no members")]
    EmptyEnsemble,
    #[error("matrix is not Hermitian: max |H - H^*| = {deviation:e}")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not symmetric: max |X - X^T| = {deviation:e}")]
    NotSymmetric { deviation: f64 },
    #[error("{solver} eigensolver did not converge within {cap} iterations")]
    NoConvergence { solver: &'static str, cap: usize },
    #[error("ensemble member {index} `{name}` (order {order}): {source}")]
    Member {
        index: usize,
        name: String,
        order: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("spectral grids differ: {0}")]
    GridMismatch(String),
    #[error("invalid spectral grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
