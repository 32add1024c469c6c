//! Grid state and action resolution.

mod digest;
mod game;
mod state;


pub use digest::Fnv1a;
pub use game::{ActionId, CompiledInput, Game, TypeId, TypeInfo};
pub use state::{ActionOutcome, GridState, Instance, InstanceId, InvariantViolation, Status};

use crate::gdy::ValidationReport;

/// Upper bound on nested `cascade` invocations within one action.
pub const MAX_CASCADE_DEPTH: u32 = 256;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("invalid game description ({} errors)", .0.errors().count())]
    Invalid(ValidationReport),
    #[error("level {index} out of range ({count} levels)")]
    LevelOutOfRange { index: usize, count: usize },
    #[error("unknown action {0}")]
    UnknownAction(ActionId),
    #[error("action {action} has no input {input}")]
    UnknownInput { action: ActionId, input: u32 },
    #[error("episode is over")]
    EpisodeOver,
    #[error("no live instance with id {0}")]
    NoSuchInstance(InstanceId),
}

/// Facing of an object, in screen coordinates (y grows downward).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Direction {
    #[default]
    Up,
    Right,
    Down,
    Left,
}

impl Direction {
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Right, Direction::Down, Direction::Left];

    pub fn vector(self) -> [i32; 2] {
        match self {
            Direction::Up => [0, -1],
            Direction::Right => [1, 0],
            Direction::Down => [0, 1],
            Direction::Left => [-1, 0],
        }
    }

    pub fn from_vector(v: [i32; 2]) -> Option<Self> {
        match v {
            [0, -1] => Some(Direction::Up),
            [1, 0] => Some(Direction::Right),
            [0, 1] => Some(Direction::Down),
            [-1, 0] => Some(Direction::Left),
            _ => None,
        }
    }

    /// Quarter turns clockwise from `Up`.
    pub fn quarter_turns(self) -> u8 {
        self as u8
    }

    pub fn turn_left(self) -> Self {
        Direction::ALL[(self as usize + 3) % 4]
    }
}

/// Rotates `v` by the rotation that takes `Up` to `orientation`.
pub fn relative_transform(orientation: Direction, v: [i32; 2]) -> [i32; 2] {
    let [ox, oy] = orientation.vector();
    let [x, y] = v;
    [-x * oy - y * ox, x * ox - y * oy]
}
