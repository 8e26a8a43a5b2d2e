use thiserror::Error;

pub type Result<T, E = NblError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum NblError {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("window mismatch: {left} vs {right} slots")]
    WindowMismatch { left: usize, right: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("undersampled noise: tau {tau} < 2 * dt {dt}")]
    Undersampled { tau: f64, dt: f64 },

    #[error("duplicate reference label {0:?}")]
    DuplicateLabel(String),

    #[error("invalid spike train: {0}")]
    InvalidSpikeTrain(String),

    #[error("signal is neither the H nor the L reference")]
    InvalidLogicValue,

    #[error("operation requires {expected} context, got {actual}")]
    ModeMismatch {
        expected: &'static str,
        actual: &'static str,
    },

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("input is undecidable: no reference correlates above threshold")]
    Undecidable,

    #[error("degenerate reference: zero power over the averaging window")]
    DegenerateReference,

    #[error("malformed frame: {0}")]
    MalformedFrame(String),

    #[error("transport failure: {0}")]
    Transport(#[from] std::io::Error),
}
