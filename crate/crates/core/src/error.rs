use crate::topology::VertexId;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the library can report. The `code` of each variant is the
/// stable identifier printed by the CLI.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("INVALID_GRAPH: {0}")]
    InvalidGraph(String),
    #[error("EMPTY_GRAPH: the graph has no edges")]
    EmptyGraph,
    #[error("INVALID_COVER: {0}")]
    InvalidCover(String),
    #[error("COVER_INCOMPLETE: vertex {vertex}")]
    CoverIncomplete { vertex: VertexId },
    #[error("UNION_DISCONNECTED: vertices {a} and {b} are not joined by the union of component subgraphs")]
    UnionDisconnected { a: VertexId, b: VertexId },
    #[error("NONPOSITIVE_RHO: rho must be a positive finite number, got {0}")]
    NonpositiveRho(f64),
    #[error("INVALID_COST: {0}")]
    InvalidCost(String),
    #[error("DIMENSION_MISMATCH: expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("UNSUPPORTED_MIX: {0}")]
    UnsupportedMix(String),
    #[error("SHAPE_MISMATCH: {0}")]
    ShapeMismatch(String),
    #[error("INDEX_OUT_OF_RANGE: index {index} not below {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("NOT_AN_EDGE: {{{v}, {w}}}")]
    NotAnEdge { v: VertexId, w: VertexId },
    #[error("NONSMOOTH_AT_POINT: cost of vertex {vertex} has no gradient at the current iterate")]
    NonsmoothAtPoint { vertex: VertexId },
    #[error("INVALID_DISTRIBUTION: {0}")]
    InvalidDistribution(String),
    #[error("INVALID_Q: {0}")]
    InvalidQ(String),
    #[error("CONFIG_INVALID at `{path}`: {message}")]
    ConfigInvalid { path: String, message: String },
    #[error("NUMERICAL_FAILURE: {0}")]
    NumericalFailure(String),
    #[error("IO_ERROR: {0}")]
    Io(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidGraph(_) => "INVALID_GRAPH",
            Error::EmptyGraph => "EMPTY_GRAPH",
            Error::InvalidCover(_) => "INVALID_COVER",
            Error::CoverIncomplete { .. } => "COVER_INCOMPLETE",
            Error::UnionDisconnected { .. } => "UNION_DISCONNECTED",
            Error::NonpositiveRho(_) => "NONPOSITIVE_RHO",
            Error::InvalidCost(_) => "INVALID_COST",
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::UnsupportedMix(_) => "UNSUPPORTED_MIX",
            Error::ShapeMismatch(_) => "SHAPE_MISMATCH",
            Error::IndexOutOfRange { .. } => "INDEX_OUT_OF_RANGE",
            Error::NotAnEdge { .. } => "NOT_AN_EDGE",
            Error::NonsmoothAtPoint { .. } => "NONSMOOTH_AT_POINT",
            Error::InvalidDistribution(_) => "INVALID_DISTRIBUTION",
            Error::InvalidQ(_) => "INVALID_Q",
            Error::ConfigInvalid { .. } => "CONFIG_INVALID",
            Error::NumericalFailure(_) => "NUMERICAL_FAILURE",
            Error::Io(_) => "IO_ERROR",
        }
    }

    /// Re-labels any error as a configuration error located at `path`.
    pub fn at(self, path: impl Into<String>) -> Error {
        match self {
            Error::ConfigInvalid { .. } => self,
            other => Error::ConfigInvalid {
                path: path.into(),
                message: other.to_string(),
            },
        }
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    if rho.is_finite() && rho > 0.0 {
        Ok(())
    } else {
        Err(Error::NonpositiveRho(rho))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
