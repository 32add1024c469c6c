//! Filesystem, tooling and benchmark layer over [`gridly_core`].

pub mod bench;
pub mod config;
mod error;
pub mod pack;
pub mod record;
pub mod rollout;
pub mod solver;
pub mod vecenv;

use std::fs;
use std::path::Path;

pub use error::Error;
pub use gridly_core as core;

use gridly_core::engine::Game;
use gridly_core::gdy::{self, ParsedGdy};

pub fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a GDY file without semantic validation.
pub fn load_unchecked(path: &Path) -> Result<ParsedGdy, Error> {
    let text = read_text(path)?;
    gdy::load_unchecked(&text).map_err(|source| Error::Gdy {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses, validates and compiles a GDY file.
pub fn load_game(path: &Path) -> Result<Game, Error> {
    let text = read_text(path)?;
    let desc = gdy::parse_gdy(&text).map_err(|source| Error::Gdy {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Game::new(desc)?)
}
