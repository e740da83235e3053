use thiserror::Error;

/// Errors raised by the library.
///
/// `InternalInconsistency` is reserved for states that the underlying theorems
/// rule out; reaching it means an implementation bug, never bad input.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GammaError {
    #[error("invalid invariant factor {0}: factors must be >= 2")]
    InvalidFactor(u64),
    #[error("group order overflow: order exceeds 2^32")]
    OrderOverflow,
    #[error("residue length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("residue {residue} out of range for factor {factor}")]
    ResidueOutOfRange { residue: u64, factor: u64 },
    #[error("table size mismatch: expected {expected} entries, got {got}")]
    TableSize { expected: usize, got: usize },
    #[error("table entry {value} at position {position} out of range (bound {bound})")]
    EntryOutOfRange {
        position: usize,
        value: usize,
        bound: usize,
    },
    #[error("element index {index} out of range (order {order})")]
    IndexOutOfRange { index: usize, order: usize },
    #[error("evaluation budget exceeded: {needed} evaluations needed, cap is {cap}")]
    BudgetExceeded { needed: u128, cap: u128 },
    #[error("ring has no Nobusawa product")]
    MissingNu,
    #[error("arity must be at least {min}, got {got}")]
    ArityTooSmall { min: usize, got: usize },
    #[error("map is not a bijection: {0}")]
    NotBijective(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid frame: {0}")]
    InvalidFrame(String),
    #[error("empty idempotent family")]
    EmptyFrameFamily,
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, GammaError>;
