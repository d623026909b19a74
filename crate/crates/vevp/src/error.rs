use std::path::PathBuf;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation was handed values outside its domain (mismatched grids,
    /// negative moduli, non-finite inputs, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A configuration file or override failed to parse or validate.
    #[error("config error: {0}")]
    Config(String),

    /// The time integrator produced a non-finite stage or a field left the
    /// plausible range; `t` is the stage time at which this was detected.
    #[error("blow-up detected at t = {t}: {message}")]
    BlowUp { t: f64, message: String },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file existed and was readable but its contents violate the format
    /// (bad magic, truncated payload, non-finite entries, ...).
    #[error("malformed file {}: {message}", path.display())]
    Malformed { path: PathBuf, message: String },
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Process exit code for the CLI: 2 = config/validation, 3 = blow-up,
    /// 4 = i/o failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) | Error::Malformed { .. } => 2,
            Error::BlowUp { .. } => 3,
            Error::Io { .. } => 4,
        }
    }
}
