use bizland_core::Error;

/// Exit status of the command-line tool for each failure class.
pub mod exit {
    pub const OTHER: i32 = 1;
    pub const PARSE: i32 = 2;
    pub const VALIDATION: i32 = 3;
    pub const CONVERGENCE: i32 = 4;
    pub const GUARD: i32 = 5;
    pub const CHECK_FAILED: i32 = 6;
}

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("validation error: {0}")]
    Validation(String),
    #[error("convergence failure: {message}")]
    Convergence { message: String, trace: Vec<f64> },
    #[error("instance rejected: {0}")]
    Guard(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
    #[error("{0}")]
    Io(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse(_) => exit::PARSE,
            Self::Validation(_) => exit::VALIDATION,
            Self::Convergence { .. } => exit::CONVERGENCE,
            Self::Guard(_) => exit::GUARD,
            Self::CheckFailed(_) => exit::CHECK_FAILED,
            Self::Io(_) => exit::OTHER,
        }
    }

    /// Prefixes the message with the context it arose in.
    pub fn context(self, what: &str) -> Self {
        match self {
            Self::Parse(m) => Self::Parse(format!("{what}: {m}")),
            Self::Validation(m) => Self::Validation(format!("{what}: {m}")),
            Self::Convergence { message, trace } => Self::Convergence {
                message: format!("{what}: {message}"),
                trace,
            },
            Self::Guard(m) => Self::Guard(format!("{what}: {m}")),
            Self::CheckFailed(m) => Self::CheckFailed(format!("{what}: {m}")),
            Self::Io(m) => Self::Io(format!("{what}: {m}")),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::NotConverged { trace, .. } | Error::OscillationDetected { trace, .. } => {
                Self::Convergence { message, trace }
            }
            Error::NoKktPoint { .. } => Self::Convergence {
                message,
                trace: Vec::new(),
            },
            Error::InstanceTooLarge(_) | Error::MultipleSolutions { .. } => Self::Guard(message),
            _ => Self::Validation(message),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::Io(e.to_string())
    }
}
