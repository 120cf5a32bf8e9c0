use thiserror::Error;

/// Errors raised by the solvers, the simulator and the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested computation exceeds the configured budget.
    #[error("resource error: {0}")]
    Resource(String),

    /// A table lookup fell outside the stored region.
    #[error("index error: {0}")]
    Index(String),

    /// A strategy was queried in a state it does not define an action for.
    #[error("state error: {0}")]
    State(String),

    /// An operation was applied to data it does not make sense for.
    #[error("contract error: {0}")]
    Contract(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub(crate) fn check_open_unit(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{name} must lie in (0, 1), got {value}"
        )))
    }
}
