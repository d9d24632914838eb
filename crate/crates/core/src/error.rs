use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("node index {index} out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("self-loop at node {0}")]
    SelfLoop(usize),

    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),

    #[error("edge ({i}, {j}) has non-positive or non-finite weight {weight}")]
    InvalidWeight { i: usize, j: usize, weight: f64 },

    #[error("node {0} is isolated (zero degree)")]
    IsolatedNode(usize),

    #[error("graph is disconnected; extract the giant component first")]
    Disconnected,

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("eigensolver residual {residual:e} exceeds tolerance {tolerance:e}")]
    EigenResidual { residual: f64, tolerance: f64 },

    #[error("no quantum correction: quantumness {0:e} is zero")]
    NoQuantumCorrection(f64),

    #[error("total link weight is zero")]
    ZeroWeight,

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate fit data: {0}")]
    DegenerateFit(String),
}

impl Error {
    /// Whether the error stems from malformed input text rather than from
    /// well-formed but invalid values.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. } | Error::Json(_))
    }

    /// Whether the error is a numerical failure (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenResidual { .. }
                | Error::NoQuantumCorrection(_)
                | Error::ZeroWeight
                | Error::DegenerateFit(_)
                | Error::NonFinite
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
