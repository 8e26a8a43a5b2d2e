//! Experiment runner for `nbl-core`.
//!
//! Every experiment is a pure function of its parameters and seed that
//! returns a [`ResultTable`]; the `nbl` binary only parses arguments and
//! writes the table.

pub mod experiments;
pub mod table;

pub use experiments::{
    run_error_curve, run_gates, run_hyperspace, run_orthogonator, run_verify, verify_transcript,
    Carrier, ErrorCurveSpec, GatesSpec, HyperspaceSpec, OrthogonatorKind, OrthogonatorSpec,
    VerifySpec,
};
pub use table::{Cell, Format, ResultTable};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error(transparent)]
    Core(#[from] nbl_core::NblError),

    #[error("output: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
