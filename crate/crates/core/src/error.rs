use thiserror::Error;

/// Errors raised by state construction, moment evaluation and the criteria.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("index {index} out of range 1..={bound}")]
    Index { index: usize, bound: usize },

    #[error("total Fock dimension {total} exceeds the cap of {cap}")]
    DimensionCap { total: usize, cap: usize },

    #[error("degenerate state: superposition has (near) zero norm")]
    DegenerateState,

    #[error("truncated coherent state loses {deficit:e} of its norm (limit {limit:e}); cutoffs of at least {required:?} are needed")]
    InsufficientCutoff {
        required: Vec<usize>,
        deficit: f64,
        limit: f64,
    },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid operator class: {0}")]
    InvalidClass(String),

    #[error("invalid positive map: {0}")]
    InvalidMap(String),

    #[error("moment matrix has vanishing trace; normalized norms are undefined")]
    DegenerateMoments,

    #[error("missing moments: {}", .0.join(", "))]
    MissingMoments(Vec<String>),

    #[error("moment series for element {element} does not converge (terms stop decaying at order {order})")]
    Divergence { element: String, order: usize },

    #[error("moments are inconsistent with a density matrix: {0}")]
    InconsistentMoments(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown library entry `{0}`")]
    Unknown(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
