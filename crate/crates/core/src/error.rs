use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: m = {m}, T = {length} (need m >= 1 and finite T > 0)")]
    InvalidGrid { m: usize, length: f64 },

    #[error("basis index {index} out of range for m = {m}")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("t = {t} lies outside [0, {length})")]
    OutOfDomain { t: f64, length: f64 },

    #[error("spectrum length {len} does not match grid size m = {m}")]
    LengthMismatch { len: usize, m: usize },

    #[error("operands are defined on different grids")]
    GridMismatch,

    #[error("non-finite value in {context} at t = {t}")]
    NonFinite { context: &'static str, t: f64 },

    #[error("invalid order {order}: {reason}")]
    InvalidOrder { order: f64, reason: &'static str },

    #[error("gamma function argument {0} is not positive")]
    GammaDomain(f64),

    #[error(
        "projection Gram matrix is singular or ill-conditioned (condition estimate {condition:e})"
    )]
    SingularProjection { condition: f64 },

    #[error("singular system: pivot {pivot:e} at row {row} is below tolerance {tolerance:e}")]
    SingularSystem {
        row: usize,
        pivot: f64,
        tolerance: f64,
    },

    #[error("matrix is not lower triangular: entry ({row}, {col}) is nonzero")]
    NotLowerTriangular { row: usize, col: usize },

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("syntax error at offset {offset}: found {found}, expected {}", .expected.join(" or "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<String>,
    },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("cannot evaluate `{node}` at t = {t}: {reason}")]
    Eval {
        node: String,
        t: f64,
        reason: &'static str,
    },
}

impl Error {
    /// True for failures that arise while computing, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonFinite { .. }
                | Error::SingularSystem { .. }
                | Error::SingularProjection { .. }
                | Error::Eval { .. }
        )
    }
}
