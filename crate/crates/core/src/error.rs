use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("graph is disconnected ({components} components); use components_certificate")]
    Disconnected { components: usize },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("invalid surgery: {0}")]
    InvalidSurgery(String),

    #[error("invalid link: {0}")]
    InvalidLink(String),

    #[error("no face partition: {0}")]
    NoPartition(String),

    #[error("construction invariant violated: {0}")]
    ConstructionInvariant(String),

    #[error("construction failed: {0}")]
    ConstructionFailure(String),

    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    #[error("search budget exceeded: {needed} rotation systems > budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("vertex {0} out of range")]
    VertexOutOfRange(VertexId),

    #[error("arithmetic overflow evaluating {0}")]
    Overflow(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
