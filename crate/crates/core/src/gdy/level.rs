use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::GameDescription;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placement {
    pub object: String,
    pub x: u32,
    pub y: u32,
    /// Owning player, or 0 for unowned objects.
    pub owner: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelLayout {
    pub width: u32,
    pub height: u32,
    pub placements: Vec<Placement>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LevelError {
    UnknownCharacter { ch: char, line: u32, column: u32 },
    /// A player suffix outside `1..=count`.
    PlayerOutOfRange { player: u32, count: u32, line: u32, column: u32 },
}

impl fmt::Display for LevelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LevelError::UnknownCharacter { ch, line, column } => {
                write!(f, "unknown map character '{ch}' at line {line}, column {column}")
            }
            LevelError::PlayerOutOfRange {
                player,
                count,
                line,
                column,
            } => write!(
                f,
                "player {player} at line {line}, column {column} exceeds the player count {count}"
            ),
        }
    }
}

impl core::error::Error for LevelError {}

/// Reads a level string. Each cell is `.` (empty) or an object's map
/// character, optionally followed by one player digit (`A2`). A bare
/// avatar character belongs to player 1; other bare objects are unowned.
/// Whitespace inside a line is ignored and short lines are padded with
/// empty cells.
pub fn parse_level(text: &str, desc: &GameDescription) -> Result<LevelLayout, LevelError> {
    let mut lines: Vec<&str> = text.lines().collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    let avatar = desc.player.avatar_object.as_deref();
    let mut placements = Vec::new();
    let mut width = 0u32;
    for (y, line) in lines.iter().enumerate() {
        let line_no = y as u32 + 1;
        let mut x = 0u32;
        let mut chars = line.chars().enumerate().peekable();
        while let Some((col, ch)) = chars.next() {
            let column = col as u32 + 1;
            if ch.is_whitespace() {
                continue;
            }
            if ch == '.' {
                x += 1;
                continue;
            }
            let Some(object) = desc.objects.iter().find(|o| o.map_character == ch) else {
                return Err(LevelError::UnknownCharacter {
                    ch,
                    line: line_no,
                    column,
                });
            };
            let mut owner = if avatar == Some(object.name.as_str()) { 1 } else { 0 };
            if let Some(&(dcol, d)) = chars.peek() {
                if let Some(player) = d.to_digit(10) {
                    chars.next();
                    if player == 0 || player > desc.player.count {
                        return Err(LevelError::PlayerOutOfRange {
                            player,
                            count: desc.player.count,
                            line: line_no,
                            column: dcol as u32 + 1,
                        });
                    }
                    owner = player;
                }
            }
            placements.push(Placement {
                object: object.name.clone(),
                x,
                y: y as u32,
                owner,
            });
            x += 1;
        }
        width = width.max(x);
    }
    Ok(LevelLayout {
        width,
        height: lines.len() as u32,
        placements,
    })
}
