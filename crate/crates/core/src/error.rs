use thiserror::Error;

/// Errors produced by array construction, file ingestion, and the
/// inference engines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("line {line}: cannot parse `{token}` as a number")]
    NonNumeric { line: usize, token: String },

    #[error("line {line}: duplicate multi-index {index:?}")]
    DuplicateIndex { line: usize, index: Vec<usize> },

    #[error("missing cell at multi-index {index:?}")]
    MissingCell { index: Vec<usize> },

    #[error("line {line}: self-loop edge ({id})")]
    SelfLoop { line: usize, id: String },

    #[error("line {line}: duplicate edge ({from}, {to})")]
    DuplicateEdge {
        line: usize,
        from: String,
        to: String,
    },

    #[error("too few units: need n >= {need}, have n = {have}")]
    TooFewUnits { need: usize, have: usize },

    #[error("degenerate scale: coordinate {coord} has zero variance estimate")]
    DegenerateScale { coord: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("band style {requested} requires a result computed in {requested} mode, got {actual}")]
    ModeMismatch {
        requested: &'static str,
        actual: &'static str,
    },

    #[error("all observations are zero; cannot estimate the continuous part")]
    ZeroMassOnly,

    #[error("enumeration support too large: {combinations} combinations exceed budget {budget}")]
    SupportTooLarge { combinations: u128, budget: u64 },

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
