use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integrand is not integrable near zero")]
    NonIntegrableNearZero,
    #[error("functional is degenerate at t = {0}")]
    DegenerateAtPoint(f64),
    #[error("target {target} not bracketed by ({lo}, {hi})")]
    TargetNotBracketed { target: f64, lo: f64, hi: f64 },
    #[error("weight pair is not admissible")]
    NotAdmissible,
    #[error("level solve failed: {0}")]
    LevelSolveFailed(String),
    #[error("index {0} outside the stored sequence window")]
    IndexOutOfWindow(i64),
    #[error("support of the test function escapes the sequence window above {0}")]
    SupportNotCovered(f64),
    #[error("condition value is infinite; no saturator exists")]
    ConditionInfinite,
    #[error("sequence is not geometric: minimal ratio {0} <= 1")]
    NotGeometric(f64),
    #[error("all sequence entries are zero")]
    DegenerateB,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = core::result::Result<T, Error>;
