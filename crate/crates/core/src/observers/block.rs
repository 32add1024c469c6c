use alloc::vec::Vec;

use super::Window;
use crate::engine::{Game, GridState};
use crate::gdy::{BlockRender, Shape};

pub const BACKGROUND: [u8; 3] = [0, 0, 0];

/// Used for object types without a `Block2D` entry.
const PALETTE: [[u8; 3]; 8] = [
    [230, 25, 75],
    [60, 180, 75],
    [255, 225, 25],
    [0, 130, 200],
    [245, 130, 48],
    [145, 30, 180],
    [70, 240, 240],
    [240, 50, 230],
];

/// RGB pixels, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PixelObservation {
    pub width: u32,
    pub height: u32,
    pub data: Vec<u8>,
}

impl PixelObservation {
    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = ((y * self.width + x) * 3) as usize;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

#[derive(Debug, Clone)]
struct Sprite {
    color: [u8; 3],
    /// Covered pixels as `(offset, run length)` within the tile, row-major.
    runs: Vec<(u32, u32)>,
}

/// Rasterises object types as flat shapes. Tiles are precomputed per type.
#[derive(Debug, Clone)]
pub struct BlockRenderer {
    tile_size: u32,
    sprites: Vec<Sprite>,
}

fn covers(shape: Shape, ts: i64, px: i64, py: i64) -> bool {
    match shape {
        Shape::Square => true,
        Shape::Circle => {
            let (dx, dy) = (2 * px + 1 - ts, 2 * py + 1 - ts);
            dx * dx + dy * dy <= ts * ts
        }
        Shape::Triangle => 2 * (2 * px + 1 - ts).abs() <= 2 * py + 1,
    }
}

impl BlockRenderer {
    pub fn new(game: &Game) -> Self {
        Self::with_tile_size(game, game.description().tile_size)
    }

    pub fn with_tile_size(game: &Game, tile_size: u32) -> Self {
        let ts = tile_size.max(1);
        let sprites = game
            .types()
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let BlockRender { shape, color } = t.block.unwrap_or(BlockRender {
                    shape: Shape::Square,
                    color: PALETTE[i % PALETTE.len()],
                });
                let mut runs = Vec::new();
                for py in 0..ts {
                    let mut px = 0;
                    while px < ts {
                        if covers(shape, ts as i64, px as i64, py as i64) {
                            let start = px;
                            while px < ts && covers(shape, ts as i64, px as i64, py as i64) {
                                px += 1;
                            }
                            runs.push((py * ts + start, px - start));
                        } else {
                            px += 1;
                        }
                    }
                }
                Sprite { color, runs }
            })
            .collect();
        BlockRenderer { tile_size: ts, sprites }
    }

    pub fn tile_size(&self) -> u32 {
        self.tile_size
    }

    /// Draws every instance in each visible cell, lowest z first.
    pub fn render_into(&self, state: &GridState, window: &Window, out: &mut PixelObservation) {
        let ts = self.tile_size;
        out.width = window.width * ts;
        out.height = window.height * ts;
        out.data.clear();
        out.data.resize((out.width * out.height * 3) as usize, 0);
        for px in out.data.chunks_exact_mut(3) {
            px.copy_from_slice(&BACKGROUND);
        }
        let stride = out.width;
        for wy in 0..window.height {
            for wx in 0..window.width {
                let Some((x, y)) = window.world(wx, wy) else { continue };
                for id in state.cell(x, y).flatten() {
                    let Some(inst) = state.instance(id) else { continue };
                    let sprite = &self.sprites[inst.type_id];
                    let origin = wy * ts * stride + wx * ts;
                    for &(offset, len) in &sprite.runs {
                        let (row, col) = (offset / ts, offset % ts);
                        let start = ((origin + row * stride + col) * 3) as usize;
                        for px in out.data[start..start + len as usize * 3].chunks_exact_mut(3) {
                            px.copy_from_slice(&sprite.color);
                        }
                    }
                }
            }
        }
    }

    pub fn render(&self, state: &GridState, window: &Window) -> PixelObservation {
        let mut out = PixelObservation::default();
        self.render_into(state, window, &mut out);
        out
    }
}
