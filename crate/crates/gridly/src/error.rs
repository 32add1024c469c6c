use std::io;
use std::path::PathBuf;

use gridly_core::engine::{EngineError, InvariantViolation};
use gridly_core::env::EnvError;
use gridly_core::gdy::GdyError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{}: {source}", path.display())]
    Gdy {
        path: PathBuf,
        #[source]
        source: GdyError,
    },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error("invariant violated at step {step}: {violation}")]
    Invariant { step: u64, violation: InvariantViolation },
    #[error("{}: {message}", path.display())]
    Manifest { path: PathBuf, message: String },
    #[error("unknown game '{0}': not a file and not in the pack")]
    UnknownGame(String),
    #[error("config: {0}")]
    Config(String),
    #[error("solution line {line}: {message}")]
    Solution { line: usize, message: String },
    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
}
