use thiserror::Error;

use crate::quadrature::Estimate;

pub type Result<T> = std::result::Result<T, LelongError>;

#[derive(Debug, Clone, Error)]
pub enum LelongError {
    /// A derivative or value came out non-finite.
    #[error("non-finite {what} at coordinate {coordinate}")]
    Evaluation { coordinate: usize, what: &'static str },

    #[error("contract violation: {0}")]
    Contract(String),

    /// The integrand was probed exactly on an annotated singular locus.
    #[error("evaluation on singular locus {locus:?} of {current}")]
    SingularEvaluation { current: String, locus: Vec<usize> },

    #[error("{op} is not supported for {current}")]
    UnsupportedOperation { current: String, op: &'static str },

    #[error("unknown name `{name}`; available: {available}")]
    Lookup { name: String, available: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("level {r} outside the validity range (limit {limit})")]
    Range { r: f64, limit: f64 },

    #[error("singularity {kernel} on locus {locus:?} is not integrable (real codimension {codim})")]
    NonIntegrable { locus: Vec<usize>, kernel: String, codim: usize },

    #[error("evaluation budget of {budget} exhausted (best estimate {} +/- {})", best.value, best.error)]
    BudgetExceeded { budget: u64, best: Estimate },

    /// g and the dd^c-weighted integrals are undefined when Condition (C) fails.
    #[error("Condition (C) fails: {0}")]
    ConditionCFails(String),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for LelongError {
    fn from(e: std::io::Error) -> Self {
        LelongError::Io(e.to_string())
    }
}
