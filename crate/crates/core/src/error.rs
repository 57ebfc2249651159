use thiserror::Error;

/// Errors raised by the library. The variants line up with the CLI exit codes.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or inconsistent input (bad ids, dimensions, configs, parameters).
    #[error("input error: {0}")]
    Input(String),
    /// No independent set of the requested size exists.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A documented capacity limit was exceeded (enumeration budget, Held-Karp size, ...).
    #[error("capability limit: {0}")]
    Capability(String),
    /// An internal invariant did not hold, typically a custom oracle that is not a matroid.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// Operation called on a state that cannot accept it.
    #[error("state error: {0}")]
    State(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Process exit code for this error: 1 input, 2 infeasible, 3 capability.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Infeasible(_) => 2,
            Error::Capability(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
