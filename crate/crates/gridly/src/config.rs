//! Run options from a TOML file.

use std::path::Path;

use serde::Deserialize;

use gridly_core::env::{EnvOptions, ObserverKind};

use crate::{read_text, Error};

/// Every field is optional; command-line flags take precedence.
///
/// ```toml
/// game = "sokoban"
/// level = 1
/// max_steps = 500
/// seed = 7
/// observer = "block"
/// ```
#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub game: Option<String>,
    pub level: Option<usize>,
    pub max_steps: Option<u64>,
    pub seed: Option<u64>,
    pub observer: Option<String>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        Self::parse(&read_text(path)?)
    }

    /// Fields set in `other` replace ours.
    pub fn merge(self, other: RunConfig) -> RunConfig {
        RunConfig {
            game: other.game.or(self.game),
            level: other.level.or(self.level),
            max_steps: other.max_steps.or(self.max_steps),
            seed: other.seed.or(self.seed),
            observer: other.observer.or(self.observer),
        }
    }

    pub fn options(&self) -> EnvOptions {
        let defaults = EnvOptions::default();
        EnvOptions {
            max_steps: self.max_steps.unwrap_or(defaults.max_steps),
            level: self.level.unwrap_or(defaults.level),
            seed: self.seed.unwrap_or(defaults.seed),
        }
    }

    pub fn observer_kind(&self) -> Result<ObserverKind, Error> {
        match &self.observer {
            None => Ok(ObserverKind::Vector),
            Some(name) => ObserverKind::from_name(name)
                .ok_or_else(|| Error::Config(format!("unknown observer '{name}' (vector, ascii, block)"))),
        }
    }
}
