use thiserror::Error;

use crate::space::MetricViolation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid metric: {0}")]
    Metric(#[from] MetricViolation),

    #[error("graph is disconnected: vertex {to} is unreachable from vertex {from}")]
    Disconnected { from: usize, to: usize },

    #[error("invalid edge ({from}, {to}) with weight {weight}: {reason}")]
    InvalidEdge {
        from: usize,
        to: usize,
        weight: f64,
        reason: &'static str,
    },

    #[error("{kind}({requested}) exceeds the configured limit {limit}")]
    Capacity {
        kind: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid function: {0}")]
    InvalidFunction(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid cost parameters: {0}")]
    InvalidCost(String),

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("premise not satisfied: {0}")]
    Premise(String),

    #[error("infinite value used in arithmetic: {0}")]
    InfiniteValue(&'static str),
}

impl Error {
    /// Short machine-readable tag used in CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Metric(_) => "metric",
            Error::Disconnected { .. } => "disconnected",
            Error::InvalidEdge { .. } => "invalid_edge",
            Error::Capacity { .. } => "capacity",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidMeasure(_) => "invalid_measure",
            Error::InvalidFunction(_) => "invalid_function",
            Error::InvalidKernel(_) => "invalid_kernel",
            Error::InvalidCost(_) => "invalid_cost",
            Error::Range(_) => "range",
            Error::Domain(_) => "domain",
            Error::Premise(_) => "premise",
            Error::InfiniteValue(_) => "infinite_value",
        }
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
