use thiserror::Error;

/// Crate-wide error type.  Variants map onto the CLI exit-code contract:
/// configuration/validation errors exit 2, well-posedness refusals exit 3,
/// accuracy failures exit 4 and I/O or format problems exit 5.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration: {0}")]
    Config(String),

    #[error("validation: {0}")]
    Validation(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("domain: {0}")]
    DomainError(String),

    #[error("well-posedness: {message}")]
    WellPosedness {
        message: String,
        /// Largest condition number observed by the probe, when available.
        condition: Option<f64>,
    },

    #[error("accuracy: {message} (achieved {achieved:.3e}, required {required:.3e})")]
    Accuracy {
        message: String,
        achieved: f64,
        required: f64,
    },

    #[error("unsupported path: {0}")]
    Unsupported(String),

    #[error("container format: {0}")]
    Format(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn well_posedness(message: impl Into<String>, condition: Option<f64>) -> Self {
        Error::WellPosedness {
            message: message.into(),
            condition,
        }
    }

    pub fn accuracy(message: impl Into<String>, achieved: f64, required: f64) -> Self {
        Error::Accuracy {
            message: message.into(),
            achieved,
            required,
        }
    }

    /// Exit code for the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Validation(_)
            | Error::GridMismatch(_)
            | Error::SingularPoint(_)
            | Error::DomainError(_)
            | Error::Unsupported(_) => 2,
            Error::WellPosedness { .. } => 3,
            Error::Accuracy { .. } => 4,
            Error::Format(_) | Error::Io(_) | Error::Json(_) => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
