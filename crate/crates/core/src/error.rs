use thiserror::Error;

use crate::algebra::ValidationReport;

pub type Result<T, E = MlaError> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum MlaError {
    /// Operation tables do not describe a multiplicative Lie algebra.
    #[error("invalid algebra: {0}")]
    Invalid(ValidationReport),

    /// A cocycle or action-term triple builds an algebra that fails validation.
    #[error("incompatible data: {0}")]
    Incompatible(ValidationReport),

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("order {order} exceeds the configured ceiling {limit}")]
    OrderOverflow { order: usize, limit: usize },

    #[error("{what}: size {size} exceeds the configured ceiling {limit}")]
    SizeBound {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// An exhaustive search would exceed (or did exceed) its candidate ceiling.
    #[error("{what}: search space {explored} exceeds the ceiling {limit}")]
    SearchBound {
        what: &'static str,
        explored: u128,
        limit: u64,
    },

    #[error("subset is not an ideal: {0}")]
    NotAnIdeal(String),

    #[error("subset is not a subalgebra: {0}")]
    NotASubalgebra(String),

    #[error("{0} is not abelian (needs a commutative group with trivial bracket)")]
    NotAbelianKernel(String),

    #[error("cocycle table `{table}` is not normalized at {witness:?}")]
    NotNormalized {
        table: &'static str,
        witness: Vec<usize>,
    },

    #[error("value {value} computed for {context} lies outside the kernel")]
    KernelEscape { context: String, value: usize },

    #[error("value computed for {context} leaves the fixed subalgebra")]
    ImageEscape { context: String },

    #[error("factor set value at {witness:?} is not in the algebraic center")]
    ImageNotCentral { witness: Vec<usize> },

    #[error("induced action is ill-defined: {0}")]
    IllDefined(String),

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),

    #[error("not an extension: {0}")]
    NotExact(String),

    #[error("unknown catalog key `{0}`")]
    UnknownKey(String),

    #[error("malformed input: {0}")]
    Format(String),
}
