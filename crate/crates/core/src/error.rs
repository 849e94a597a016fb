use thiserror::Error;

/// Errors raised by the simulator and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resonance: {0}")]
    Resonance(String),
    #[error("singular transition: {0}")]
    Singularity(String),
    #[error("grid geometry: {0}")]
    Geometry(String),
    #[error("grid resolution: {0}")]
    Resolution(String),
    #[error("numerical instability: {0}")]
    Instability(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! ensure {
    ($cond:expr, $variant:ident, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::Error::$variant(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
