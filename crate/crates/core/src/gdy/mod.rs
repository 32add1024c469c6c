//! GDY game descriptions: the data model, the YAML front end, level strings,
//! semantic validation and serialization back to GDY text.

mod level;
mod schema;
mod serialize;
mod validate;

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::yaml::{self, Mark};

pub use level::{parse_level, LevelError, LevelLayout, Placement};
pub use serialize::{serialize, to_yaml};
pub use validate::{validate, Diagnostic, Severity, ValidationReport};

/// Destination object name matching an empty cell.
pub const EMPTY: &str = "_empty";
/// Tokens that may not be used as object or variable names.
pub const RESERVED: [&str; 6] = ["_dest", "_src", "_dir", "_steps", "_empty", "_boundary"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameDescription {
    pub name: String,
    /// Pixels per tile for the block observer.
    pub tile_size: u32,
    pub player: PlayerConfig,
    pub termination: TerminationConfig,
    /// Global variables and their initial values.
    pub variables: Vec<VariableDef>,
    /// Level strings exactly as written in the document.
    pub levels: Vec<String>,
    /// Definition order is the observer channel order.
    pub objects: Vec<ObjectType>,
    pub actions: Vec<ActionDefinition>,
}

impl GameDescription {
    pub fn object(&self, name: &str) -> Option<&ObjectType> {
        self.objects.iter().find(|o| o.name == name)
    }

    pub fn object_index(&self, name: &str) -> Option<usize> {
        self.objects.iter().position(|o| o.name == name)
    }

    pub fn action(&self, name: &str) -> Option<&ActionDefinition> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn level_layout(&self, index: usize) -> Option<Result<LevelLayout, LevelError>> {
        self.levels.get(index).map(|text| parse_level(text, self))
    }
}

pub const DEFAULT_TILE_SIZE: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableDef {
    pub name: String,
    pub initial: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlayerConfig {
    pub count: u32,
    pub avatar_object: Option<String>,
    pub observer: ObserverConfig,
}

impl Default for PlayerConfig {
    fn default() -> Self {
        PlayerConfig {
            count: 1,
            avatar_object: None,
            observer: ObserverConfig::default(),
        }
    }
}

/// Window geometry for a player observer. A missing width or height means
/// "the level's size".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObserverConfig {
    pub width: Option<u32>,
    pub height: Option<u32>,
    pub offset_x: i32,
    pub offset_y: i32,
    pub track_avatar: bool,
    pub rotate_with_avatar: bool,
}

impl ObserverConfig {
    /// Untracked, top-left anchored window covering a whole level.
    pub fn global() -> Self {
        ObserverConfig::default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TerminationConfig {
    pub win: Vec<Condition>,
    pub lose: Vec<Condition>,
    pub end: Vec<Condition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CompareOp {
    Eq,
    Neq,
    Gt,
    Lt,
}

impl CompareOp {
    pub const ALL: [CompareOp; 4] = [CompareOp::Eq, CompareOp::Neq, CompareOp::Gt, CompareOp::Lt];

    pub fn keyword(self) -> &'static str {
        match self {
            CompareOp::Eq => "eq",
            CompareOp::Neq => "neq",
            CompareOp::Gt => "gt",
            CompareOp::Lt => "lt",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.keyword() == s)
    }

    pub fn holds(self, lhs: i64, rhs: i64) -> bool {
        match self {
            CompareOp::Eq => lhs == rhs,
            CompareOp::Neq => lhs != rhs,
            CompareOp::Gt => lhs > rhs,
            CompareOp::Lt => lhs < rhs,
        }
    }
}

/// Termination condition. `player` selects who wins or loses when the
/// condition fires; it defaults to player 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub op: CompareOp,
    pub lhs: Expr,
    pub rhs: Expr,
    pub player: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Literal(i64),
    /// `<object>:count`, the number of live instances of a type.
    Count(String),
    /// A global variable, or inside commands a variable of the executing
    /// object.
    Variable(String),
    /// `_steps`
    Steps,
}

impl Expr {
    pub fn parse(text: &str) -> Expr {
        let text = text.trim();
        if let Ok(v) = text.parse::<i64>() {
            Expr::Literal(v)
        } else if text == "_steps" {
            Expr::Steps
        } else if let Some(object) = text.strip_suffix(":count") {
            Expr::Count(object.into())
        } else {
            Expr::Variable(text.into())
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Literal(v) => write!(f, "{v}"),
            Expr::Count(o) => write!(f, "{o}:count"),
            Expr::Variable(v) => f.write_str(v),
            Expr::Steps => f.write_str("_steps"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Square,
    Circle,
    Triangle,
}

impl Shape {
    pub fn keyword(self) -> &'static str {
        match self {
            Shape::Square => "square",
            Shape::Circle => "circle",
            Shape::Triangle => "triangle",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        [Shape::Square, Shape::Circle, Shape::Triangle]
            .into_iter()
            .find(|shape| shape.keyword() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRender {
    pub shape: Shape,
    pub color: [u8; 3],
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObjectType {
    pub name: String,
    pub map_character: char,
    pub z: u32,
    pub variables: Vec<VariableDef>,
    /// `None` picks a colour from the default palette by channel index.
    pub block: Option<BlockRender>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDefinition {
    pub name: String,
    pub relative: bool,
    pub inputs: Vec<InputMapping>,
    pub behaviours: Vec<Behaviour>,
}

impl ActionDefinition {
    pub fn input(&self, id: u32) -> Option<&InputMapping> {
        self.inputs.iter().find(|i| i.id == id)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputMapping {
    pub id: u32,
    pub description: String,
    pub orientation_vector: Option<[i32; 2]>,
    pub vector_to_dest: Option<[i32; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Behaviour {
    pub src_object: String,
    /// An object name or [`EMPTY`].
    pub dst_object: String,
    pub src_commands: Vec<Command>,
    pub dst_commands: Vec<Command>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    /// `_dest`
    Dest,
    /// `_src`
    Src,
}

impl Target {
    pub fn keyword(self) -> &'static str {
        match self {
            Target::Dest => "_dest",
            Target::Src => "_src",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        match s {
            "_dest" => Some(Target::Dest),
            "_src" => Some(Target::Src),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Move the executing object to the target cell.
    Mov(Target),
    /// `rot: _dir`: face along the action's world-frame orientation vector.
    Rot,
    Remove,
    Spawn { object: String, at: Target },
    Incr(String),
    Decr(String),
    Set(String, i64),
    Reward(i64),
    /// Re-run the action with the destination object as the source.
    Cascade(Target),
    /// Run `commands` only when `lhs == rhs`.
    Eq {
        lhs: Expr,
        rhs: Expr,
        commands: Vec<Command>,
    },
}

impl Command {
    pub fn keyword(&self) -> &'static str {
        match self {
            Command::Mov(_) => "mov",
            Command::Rot => "rot",
            Command::Remove => "remove",
            Command::Spawn { .. } => "spawn",
            Command::Incr(_) => "incr",
            Command::Decr(_) => "decr",
            Command::Set(..) => "set",
            Command::Reward(_) => "reward",
            Command::Cascade(_) => "cascade",
            Command::Eq { .. } => "eq",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GdyError {
    /// The text is not well-formed YAML (or uses an unsupported feature).
    Syntax { mark: Mark, message: String },
    /// Well-formed YAML that does not follow the GDY schema.
    Schema {
        path: String,
        mark: Mark,
        message: String,
    },
    /// Schema-valid document whose references or invariants do not hold.
    Reference(ValidationReport),
}

impl fmt::Display for GdyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GdyError::Syntax { mark, message } => write!(f, "syntax error at {mark}: {message}"),
            GdyError::Schema { path, mark, message } => {
                write!(f, "schema error at {mark} ({path}): {message}")
            }
            GdyError::Reference(report) => {
                write!(f, "invalid game description")?;
                for d in report.errors() {
                    write!(f, "\n  {d}")?;
                }
                Ok(())
            }
        }
    }
}

impl core::error::Error for GdyError {}

impl From<yaml::YamlError> for GdyError {
    fn from(e: yaml::YamlError) -> Self {
        GdyError::Syntax {
            mark: e.mark,
            message: e.message,
        }
    }
}

/// Result of reading a document without semantic validation.
#[derive(Debug, Clone)]
pub struct ParsedGdy {
    pub description: GameDescription,
    /// Ignored asset keys and similar non-fatal findings.
    pub warnings: Vec<Diagnostic>,
    /// Source position of each schema path, for attaching to diagnostics.
    pub marks: BTreeMap<String, Mark>,
}

impl ParsedGdy {
    /// Runs [`validate`] and attaches source positions to the diagnostics.
    pub fn validate(&self) -> ValidationReport {
        let mut report = validate(&self.description);
        for d in &mut report.diagnostics {
            d.mark = self.mark_for(&d.path);
        }
        report
    }

    fn mark_for(&self, path: &str) -> Option<Mark> {
        let mut p = path;
        loop {
            if let Some(m) = self.marks.get(p) {
                return Some(*m);
            }
            let cut = p.rfind(['.', '['])?;
            p = &p[..cut];
        }
    }
}

/// Reads GDY text into a description, checking syntax and schema only.
pub fn load_unchecked(source: &str) -> Result<ParsedGdy, GdyError> {
    let root = yaml::parse(source)?;
    schema::build(&root)
}

/// Parses and validates GDY text.
pub fn parse_gdy(source: &str) -> Result<GameDescription, GdyError> {
    parse_gdy_detailed(source).map(|p| p.description)
}

/// Like [`parse_gdy`] but keeps warnings and source marks.
pub fn parse_gdy_detailed(source: &str) -> Result<ParsedGdy, GdyError> {
    let parsed = load_unchecked(source)?;
    let report = parsed.validate();
    if report.has_errors() {
        return Err(GdyError::Reference(report));
    }
    Ok(parsed)
}
