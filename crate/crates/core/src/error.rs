use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument lies outside the domain of the formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// A routing instance leaves a task type without any capable worker group.
    #[error("task `{task}` has no capable worker group")]
    UncoveredTask { task: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    /// A configuration document or instance failed validation.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// Malformed flow network (bad node index, negative capacity).
    #[error("malformed network: {0}")]
    Network(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }
}
