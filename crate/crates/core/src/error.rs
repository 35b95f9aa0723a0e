use thiserror::Error;

/// Coarse failure classes. The CLI maps each one onto a stable exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numerical,
    Verification,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed rational {0:?}: expected p/q with optional leading minus and no whitespace")]
    ParseRational(String),

    #[error("malformed decimal {0:?}")]
    ParseDecimal(String),

    #[error("unknown constant {0:?}")]
    UnknownConstant(String),

    #[error("constant {name:?} stores {stored} digits but {requested} were requested")]
    ConstantPrecision {
        name: String,
        stored: usize,
        requested: usize,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("{path}: {field}: {message}")]
    Schema {
        path: String,
        field: String,
        message: String,
    },

    #[error("degree {degree} needs {needed} moments but only {available} are available")]
    InsufficientMoments {
        degree: usize,
        needed: usize,
        available: usize,
    },

    #[error("endpoint {0} lies outside the support interval")]
    OutsideInterval(String),

    #[error("parameter pole: {name} = {value} makes a denominator vanish")]
    ParameterPole { name: String, value: String },

    #[error("series does not converge: {0}")]
    NonConvergent(String),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("ill-conditioned system (condition estimate {condition:e}): {message}")]
    IllConditioned { condition: f64, message: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Numerical(_)
            | Error::Singular(_)
            | Error::IllConditioned { .. }
            | Error::NonConvergent(_)
            | Error::ParameterPole { .. } => ErrorClass::Numerical,
            Error::Verification(_) => ErrorClass::Verification,
            _ => ErrorClass::Input,
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }

    pub fn json(path: impl AsRef<std::path::Path>, source: serde_json::Error) -> Self {
        Error::Json {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
