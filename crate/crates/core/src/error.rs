use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular {
        vertex: usize,
        degree: usize,
        expected: usize,
    },
    #[error("edge {{{u}, {v}}} is a loop or a repeated edge")]
    NotSimple { u: usize, v: usize },
    #[error("index {index} out of range (size {size})")]
    BadIndex { index: usize, size: usize },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("pairing model rejected {attempts} configurations without producing a simple graph")]
    RejectionBudgetExceeded { attempts: usize },
    #[error("edge {{{u}, {v}}} is not present")]
    EdgeMissing { u: usize, v: usize },
    #[error("switch vertices are not pairwise distinct")]
    VerticesNotDistinct,
    #[error("switch would create the existing edge {{{u}, {v}}}")]
    WouldCreateMultiEdge { u: usize, v: usize },
    #[error("no edges remain outside the resampled ball")]
    NoEdgesOutside,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("dimension {n} exceeds the dense cap {cap}")]
    DenseCapExceeded { n: usize, cap: usize },
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("singular linear system")]
    SingularSystem,
    #[error("spectral parameter lies on the support")]
    OnSupport,
    #[error("ancestor depth required for the (d-1)-ary tree")]
    MissingAnc,
    #[error("eigenvectors were not computed")]
    VectorsMissing,
    #[error("resampling did not change the graph")]
    NoSwitchApplied,
    #[error("no root found: {0}")]
    NoRoot(String),
    #[error("offsets too large for the local expansion: {0}")]
    OffsetsTooLarge(String),
    #[error("empty sample")]
    Empty,
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
