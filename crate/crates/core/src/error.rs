use thiserror::Error;

/// Errors raised by the library. The CLI maps them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("csv row {row}, column {column}: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },

    #[error("csv header: {0}")]
    Header(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("subject mismatch: {0}")]
    SubjectMismatch(String),

    #[error("label disagreement for subject {subject}")]
    LabelDisagreement { subject: String },

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("training diverged: objective {objective:e} exceeded the limit; try a smaller eta0")]
    Divergence { objective: f64 },

    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn with_context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, skipping context wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Whether the error originates from malformed or inconsistent input data.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self.root(),
            Error::Io { .. }
                | Error::Csv { .. }
                | Error::Header(_)
                | Error::InvalidDataset(_)
                | Error::SubjectMismatch(_)
                | Error::LabelDisagreement { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
