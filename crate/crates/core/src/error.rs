use thiserror::Error;

use crate::{cavity::CavityError, config::ConfigError, crystal::CrystalError, gates::GateError};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Crate-level error, one variant per subsystem.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Crystal(#[from] CrystalError),
    #[error(transparent)]
    Cavity(#[from] CavityError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("invalid protocol input: {0}")]
    Protocol(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code: 2 for configuration and domain errors, 3 for
    /// numerical or solver failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Protocol(_) | Error::Io { .. } => 2,
            Error::Cavity(_) => 2,
            Error::Crystal(e) if e.is_input_error() => 2,
            Error::Crystal(_) | Error::Gate(_) => 3,
        }
    }
}
