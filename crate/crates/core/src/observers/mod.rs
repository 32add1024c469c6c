//! Pure views of a [`GridState`]: one-hot vectors, character grids and
//! rasterised pixels, each through a [`Window`].

mod ascii;
mod block;
mod vector;


pub use ascii::{observe_ascii, AsciiObservation, OUT_OF_BOUNDS};
pub use block::{BlockRenderer, PixelObservation, BACKGROUND};
pub use vector::{observe_vector, observe_vector_into, DecodeError, VectorObservation, HEADER_LEN};

use crate::engine::{relative_transform, Direction, Game, GridState, Instance};
use crate::gdy::ObserverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum ObserveError {
    #[error("player {0} has no live avatar to track")]
    AvatarDead(u32),
}

/// Maps window cells to world cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub width: u32,
    pub height: u32,
    /// World position and facing of the tracked avatar.
    pub avatar: Option<(i32, i32, Direction)>,
    pub rotate: bool,
    /// Window cell the avatar occupies.
    pub anchor: (i32, i32),
    grid: (u32, u32),
}

impl Window {
    /// Whole grid, top-left anchored.
    pub fn global(state: &GridState) -> Self {
        Window {
            width: state.width(),
            height: state.height(),
            avatar: None,
            rotate: false,
            anchor: (0, 0),
            grid: (state.width(), state.height()),
        }
    }

    /// Window for `config`. Tracking observers need the avatar; without
    /// tracking the avatar is ignored.
    pub fn new(state: &GridState, config: &ObserverConfig, avatar: Option<&Instance>) -> Option<Self> {
        let width = config.width.unwrap_or(state.width());
        let height = config.height.unwrap_or(state.height());
        let grid = (state.width(), state.height());
        if !config.track_avatar {
            return Some(Window {
                width,
                height,
                avatar: None,
                rotate: false,
                anchor: (0, 0),
                grid,
            });
        }
        let a = avatar?;
        Some(Window {
            width,
            height,
            avatar: Some((a.x, a.y, a.orientation)),
            rotate: config.rotate_with_avatar,
            anchor: (
                (width / 2) as i32 + config.offset_x,
                (height / 2) as i32 + config.offset_y,
            ),
            grid,
        })
    }

    /// World cell seen at window cell `(wx, wy)`, or `None` outside the grid.
    pub fn world(&self, wx: u32, wy: u32) -> Option<(i32, i32)> {
        let (x, y) = match self.avatar {
            None => (wx as i32, wy as i32),
            Some((ax, ay, facing)) => {
                let d = [wx as i32 - self.anchor.0, wy as i32 - self.anchor.1];
                let [dx, dy] = if self.rotate { relative_transform(facing, d) } else { d };
                (ax + dx, ay + dy)
            }
        };
        (x >= 0 && y >= 0 && (x as u32) < self.grid.0 && (y as u32) < self.grid.1).then_some((x, y))
    }
}

/// Window for `player` using `config`, locating the player's avatar when tracking.
pub fn window_transform(
    game: &Game,
    state: &GridState,
    config: &ObserverConfig,
    player: u32,
) -> Result<Window, ObserveError> {
    let avatar = if config.track_avatar {
        game.avatar_type()
            .and_then(|t| state.find(t, player))
            .and_then(|id| state.instance(id))
    } else {
        None
    };
    Window::new(state, config, avatar).ok_or(ObserveError::AvatarDead(player))
}
