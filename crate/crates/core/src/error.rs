use thiserror::Error;

/// Errors raised while building, lowering, parsing or simulating circuits.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("insufficient free wires: needed {needed}, only {available} eligible")]
    InsufficientFreeWires { needed: usize, available: usize },

    #[error("clean pool exhausted: needed {needed}, only {available} clean wires free")]
    CleanPoolExhausted { needed: usize, available: usize },

    #[error("wire {wire} out of range for width {width}")]
    WireOutOfRange { wire: u32, width: usize },

    #[error("malformed gate: {0}")]
    MalformedGate(String),

    #[error("wire {0} appears twice in one register")]
    DuplicateWire(u32),

    #[error("ledger violation: {0}")]
    LedgerViolation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{k} has no inverse modulo {r}; gcd is {gcd}")]
    NotInvertible { k: u64, r: u64, gcd: u64 },

    #[error("gate with {controls} controls needs lowering before simulation")]
    Unlowered { controls: usize },

    #[error("width {width} exceeds the limit of {limit}")]
    WidthTooLarge { width: usize, limit: usize },

    #[error("not reversible: inputs {first:#x} and {second:#x} both map to {image:#x}")]
    NotReversible { first: u64, second: u64, image: u64 },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("state norm drifted to {0}")]
    NormDrift(f64),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
