use thiserror::Error;

/// Errors raised by every fallible operation in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Configuration values violate an invariant.
    #[error("configuration error: {0}")]
    Config(String),
    /// Parameters do not belong to an admissible representation regime.
    #[error("inadmissible parameters: {0}")]
    InadmissibleParameters(String),
    /// A truncation window retains states where a radicand is negative.
    #[error("inadmissible window: {0}")]
    Window(String),
    /// A lower Pochhammer factor vanished before the series terminated.
    #[error("pole: {0}")]
    Pole(String),
    /// A series or product failed to converge, or the working precision ran out.
    #[error("precision error: {0}")]
    Precision(String),
    /// Operators that must share a basis do not.
    #[error("structural error: {0}")]
    Structural(String),
    /// The window is too small for the requested labels.
    #[error("coverage error: {0}")]
    Coverage(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Precision(_) => 4,
            _ => 3,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
