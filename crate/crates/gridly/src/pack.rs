//! The bundled game pack and its manifest.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use gridly_core::engine::Game;
use gridly_core::env::ObserverKind;
use gridly_core::gdy::{self, GameDescription};
use gridly_core::yaml::{self, Node};

use crate::solver::Script;
use crate::{read_text, Error};

pub const MANIFEST: &str = "manifest.yaml";

/// What a key does in the interactive player.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyBinding {
    NoOp,
    Action { action: String, input: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackEntry {
    pub name: String,
    pub path: PathBuf,
    pub extra_levels: Vec<PathBuf>,
    /// Declared level count, including extra levels.
    pub levels: usize,
    pub observer: ObserverKind,
    pub solution: Option<PathBuf>,
    /// Key name to binding, in manifest order.
    pub keymap: Vec<(String, KeyBinding)>,
}

impl PackEntry {
    /// The description with the extra levels appended.
    pub fn description(&self) -> Result<GameDescription, Error> {
        let text = read_text(&self.path)?;
        let mut desc = gdy::parse_gdy(&text).map_err(|source| Error::Gdy {
            path: self.path.clone(),
            source,
        })?;
        for path in &self.extra_levels {
            desc.levels.push(read_text(path)?);
        }
        Ok(desc)
    }

    pub fn game(&self) -> Result<Game, Error> {
        Ok(Game::new(self.description()?)?)
    }

    pub fn solution(&self) -> Result<Option<Script>, Error> {
        self.solution
            .as_deref()
            .map(|p| read_text(p).and_then(|t| Script::parse(&t)))
            .transpose()
    }
}

#[derive(Debug, Clone)]
pub struct Pack {
    pub dir: PathBuf,
    pub games: Vec<PackEntry>,
}

impl Pack {
    /// `$GRIDLY_GAMES`, or the `games/` directory of this source tree.
    pub fn default_dir() -> PathBuf {
        std::env::var_os("GRIDLY_GAMES")
            .map(PathBuf::from)
            .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../games"))
    }

    pub fn load_default() -> Result<Pack, Error> {
        Pack::load(&Pack::default_dir())
    }

    pub fn load(dir: &Path) -> Result<Pack, Error> {
        let path = dir.join(MANIFEST);
        let text = read_text(&path)?;
        let fail = |message: String| Error::Manifest {
            path: path.clone(),
            message,
        };
        let root = yaml::parse(&text).map_err(|e| fail(e.to_string()))?;
        let games = field(&root, "Games")
            .and_then(Node::as_sequence)
            .ok_or_else(|| fail("expected a Games list".into()))?;
        let games = games
            .iter()
            .map(|g| entry(dir, g).map_err(&fail))
            .collect::<Result<_, _>>()?;
        Ok(Pack {
            dir: dir.to_path_buf(),
            games,
        })
    }

    pub fn entry(&self, name: &str) -> Option<&PackEntry> {
        self.games.iter().find(|g| g.name == name)
    }
}

fn field<'a>(node: &'a Node, key: &str) -> Option<&'a Node> {
    node.as_mapping()?.iter().find(|e| e.key == key).map(|e| &e.value)
}

fn text<'a>(node: &'a Node, key: &str) -> Result<&'a str, String> {
    field(node, key)
        .and_then(Node::as_scalar)
        .ok_or_else(|| format!("missing or non-scalar '{key}'"))
}

fn entry(dir: &Path, node: &Node) -> Result<PackEntry, String> {
    let name = text(node, "Name")?.to_string();
    let ctx = |m: String| format!("{name}: {m}");
    let levels = text(node, "Levels")
        .map_err(ctx)?
        .parse()
        .map_err(|_| ctx("Levels must be an integer".into()))?;
    let observer = match field(node, "Observer") {
        None => ObserverKind::Vector,
        Some(n) => n
            .as_scalar()
            .and_then(ObserverKind::from_name)
            .ok_or_else(|| ctx("Observer must be vector, ascii or block".into()))?,
    };
    let extra_levels = match field(node, "ExtraLevels") {
        None => Vec::new(),
        Some(n) => n
            .as_sequence()
            .ok_or_else(|| ctx("ExtraLevels must be a list".into()))?
            .iter()
            .map(|p| p.as_scalar().map(|p| dir.join(p)))
            .collect::<Option<_>>()
            .ok_or_else(|| ctx("ExtraLevels entries must be paths".into()))?,
    };
    let mut keymap = Vec::new();
    if let Some(map) = field(node, "Keymap") {
        for e in map.as_mapping().ok_or_else(|| ctx("Keymap must be a mapping".into()))? {
            let binding = match (e.value.as_scalar(), e.value.as_sequence()) {
                (Some("noop"), _) => KeyBinding::NoOp,
                (_, Some([action, input])) => KeyBinding::Action {
                    action: action.as_scalar().unwrap_or_default().to_string(),
                    input: input
                        .as_scalar()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| ctx(format!("key '{}': bad input id", e.key)))?,
                },
                _ => return Err(ctx(format!("key '{}': expected noop or [action, input]", e.key))),
            };
            keymap.push((e.key.clone(), binding));
        }
    }
    Ok(PackEntry {
        path: dir.join(text(node, "Path").map_err(ctx)?),
        solution: field(node, "Solution").and_then(Node::as_scalar).map(|p| dir.join(p)),
        name,
        extra_levels,
        levels,
        observer,
        keymap,
    })
}

/// Resolves a game argument: a GDY path, or the name of a pack game.
/// Returns the display name and the compiled game.
pub fn resolve_game(arg: &str) -> Result<(String, Arc<Game>), Error> {
    let path = Path::new(arg);
    if path.is_file() {
        let game = crate::load_game(path)?;
        return Ok((game.name().to_string(), Arc::new(game)));
    }
    let pack = Pack::load_default()?;
    let entry = pack.entry(arg).ok_or_else(|| Error::UnknownGame(arg.to_string()))?;
    Ok((entry.name.clone(), Arc::new(entry.game()?)))
}
