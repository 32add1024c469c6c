use alloc::vec::Vec;
use core::fmt;

use super::Window;
use crate::engine::{Game, GridState};

/// Shown for window cells outside the grid.
pub const OUT_OF_BOUNDS: char = ' ';

/// Character grid, row-major. Displays as one line per row, each ending in `\n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsciiObservation {
    pub width: u32,
    pub height: u32,
    pub cells: Vec<char>,
}

impl AsciiObservation {
    pub fn get(&self, x: u32, y: u32) -> char {
        self.cells[(y * self.width + x) as usize]
    }
}

impl fmt::Display for AsciiObservation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.cells.chunks(self.width.max(1) as usize) {
            for c in row {
                write!(f, "{c}")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Map character of the top-z instance per cell, `.` when empty.
pub fn observe_ascii(game: &Game, state: &GridState, window: &Window) -> AsciiObservation {
    let mut cells = Vec::with_capacity((window.width * window.height) as usize);
    for wy in 0..window.height {
        for wx in 0..window.width {
            let c = match window.world(wx, wy) {
                None => OUT_OF_BOUNDS,
                Some((x, y)) => state
                    .top(x, y)
                    .and_then(|id| state.instance(id))
                    .map_or('.', |i| game.types()[i.type_id].map_character),
            };
            cells.push(c);
        }
    }
    AsciiObservation {
        width: window.width,
        height: window.height,
        cells,
    }
}
