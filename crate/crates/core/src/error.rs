use alloc::string::String;

/// Errors reported by the core algorithms.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("length mismatch: expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invalid hex string: {0}")]
    InvalidHex(String),

    #[error("invalid QC specification: {0}")]
    InvalidSpec(String),

    #[error("parity-check matrix is rank deficient: rank {rank} for {rows} rows")]
    RankDeficient { rank: usize, rows: usize },

    /// The systematic form needed by the operation only exists after a
    /// column permutation.
    #[error("{form} systematic form requires a column permutation (pivot block singular)")]
    SingularBlock { form: &'static str },

    #[error("estimated cost of {estimate} encodings exceeds the ceiling of {ceiling}")]
    CostCeiling { estimate: u128, ceiling: u128 },

    #[error("probability `{name}` = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
