use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("degree cap exceeded: degree {degree} > {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("order cap exceeded: order {order} > {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("tensor too large: {entries} entries")]
    TensorSize { entries: usize },

    #[error("invalid Gram matrix: {0}")]
    Gram(String),

    #[error("contraction index {r} out of range for orders {p} and {q}")]
    ContractionRange { r: usize, p: usize, q: usize },

    #[error("space mismatch between operands")]
    SpaceMismatch,

    #[error("operation requires an orthonormal-basis representation")]
    NotOrthonormal,

    #[error("index out of range: {0}")]
    IndexRange(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("circulant embedding failed: most negative eigenvalue {min_eigenvalue:e} (max {max_eigenvalue:e})")]
    Embedding { min_eigenvalue: f64, max_eigenvalue: f64 },

    #[error("divergent series: {0}")]
    DivergentSeries(String),

    #[error("derivative order {order} unavailable (max {max})")]
    DerivativeOrder { order: usize, max: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("malformed path file: {0}")]
    PathFormat(String),

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
