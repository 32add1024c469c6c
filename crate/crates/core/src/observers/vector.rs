use alloc::vec;
use alloc::vec::Vec;

use super::Window;
use crate::engine::{Game, GridState};

/// Bytes before the data in [`VectorObservation::to_bytes`]: C, H, W as little-endian u32.
pub const HEADER_LEN: usize = 12;

/// One-hot presence of each object type, laid out as (channel, row, column).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VectorObservation {
    pub channels: u32,
    pub height: u32,
    pub width: u32,
    pub data: Vec<i8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DecodeError {
    #[error("buffer of {0} bytes is shorter than the header")]
    Truncated(usize),
    #[error("header declares {expected} data bytes but {actual} follow")]
    Length { expected: usize, actual: usize },
}

impl VectorObservation {
    pub fn shape(&self) -> (u32, u32, u32) {
        (self.channels, self.height, self.width)
    }

    pub fn get(&self, c: u32, y: u32, x: u32) -> i8 {
        self.data[((c * self.height + y) * self.width + x) as usize]
    }

    pub fn channel_sum(&self, c: u32) -> i64 {
        let n = (self.height * self.width) as usize;
        self.data[c as usize * n..(c as usize + 1) * n]
            .iter()
            .map(|&v| v as i64)
            .sum()
    }

    /// Header followed by the int8 data.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.data.len());
        for v in [self.channels, self.height, self.width] {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out.extend(self.data.iter().map(|&v| v as u8));
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, DecodeError> {
        if bytes.len() < HEADER_LEN {
            return Err(DecodeError::Truncated(bytes.len()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i * 4..i * 4 + 4].try_into().unwrap());
        let (channels, height, width) = (word(0), word(1), word(2));
        let expected = channels as usize * height as usize * width as usize;
        let body = &bytes[HEADER_LEN..];
        if body.len() != expected {
            return Err(DecodeError::Length {
                expected,
                actual: body.len(),
            });
        }
        Ok(VectorObservation {
            channels,
            height,
            width,
            data: body.iter().map(|&b| b as i8).collect(),
        })
    }
}

/// Fills `out`, reusing its buffer.
pub fn observe_vector_into(game: &Game, state: &GridState, window: &Window, out: &mut VectorObservation) {
    let channels = game.types().len() as u32;
    out.channels = channels;
    out.height = window.height;
    out.width = window.width;
    let plane = (window.width * window.height) as usize;
    out.data.clear();
    out.data.resize(channels as usize * plane, 0);
    for wy in 0..window.height {
        for wx in 0..window.width {
            let Some((x, y)) = window.world(wx, wy) else { continue };
            let offset = (wy * window.width + wx) as usize;
            for id in state.cell(x, y).flatten() {
                if let Some(inst) = state.instance(id) {
                    out.data[inst.type_id * plane + offset] = 1;
                }
            }
        }
    }
}

pub fn observe_vector(game: &Game, state: &GridState, window: &Window) -> VectorObservation {
    let mut out = VectorObservation {
        data: vec![],
        ..Default::default()
    };
    observe_vector_into(game, state, window, &mut out);
    out
}
