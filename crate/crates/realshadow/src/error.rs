use realshadow_core::Error as CoreError;
use thiserror::Error;

/// Input that could not be parsed: polynomial, point, list or viewport.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("cannot parse {what} {input:?}: {message}")]
pub struct ParseError {
    pub what: &'static str,
    pub input: String,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(what: &'static str, input: &str, message: impl Into<String>) -> Self {
        ParseError { what, input: input.to_string(), message: message.into() }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("invalid config file: {0}")]
    Config(#[from] serde_json::Error),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn io(path: impl std::fmt::Display, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_string(), source }
    }

    /// 0 ok, 1 io, 2 usage, 3 ambiguous verdict, 4 insufficient data,
    /// 5 numerical failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Parse(_) | CliError::Config(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                CoreError::AmbiguousClassification { .. } => 3,
                CoreError::InsufficientSample => 4,
                CoreError::Escaped { .. }
                | CoreError::NotConverged { .. }
                | CoreError::OutsideDomain { .. }
                | CoreError::BranchAmbiguity
                | CoreError::NewtonDiverged { .. }
                | CoreError::RootSolveFailed { .. }
                | CoreError::RootIsolationFailed => 5,
                CoreError::InvalidPolynomial(_)
                | CoreError::InvalidArgument(_)
                | CoreError::PreconditionViolated(_)
                | CoreError::NotNonExceptional
                | CoreError::InvariantLine
                | CoreError::NotEscaping => 2,
            },
        }
    }
}
