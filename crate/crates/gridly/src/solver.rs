//! Breadth-first search over the forward model, and solution scripts.

use std::collections::HashSet;
use std::fmt;

use gridly_core::engine::{ActionId, Game, GridState, Status};
use gridly_core::env::PlayerAction;

use crate::Error;

/// One scripted move: an action name and input id, or the no-op.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScriptStep {
    NoOp,
    Action { action: String, input: u32 },
}

/// A single-player move list. Text form: one `<action> <input>` or `noop`
/// per line; `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Script {
    pub steps: Vec<ScriptStep>,
}

impl Script {
    pub fn parse(text: &str) -> Result<Script, Error> {
        let mut steps = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fail = |message: &str| Error::Solution {
                line: i + 1,
                message: message.to_string(),
            };
            let mut words = line.split_whitespace();
            let step = match (words.next(), words.next(), words.next()) {
                (Some("noop"), None, None) => ScriptStep::NoOp,
                (Some(action), Some(input), None) => ScriptStep::Action {
                    action: action.to_string(),
                    input: input.parse().map_err(|_| fail("input id must be an integer"))?,
                },
                _ => return Err(fail("expected '<action> <input>' or 'noop'")),
            };
            steps.push(step);
        }
        Ok(Script { steps })
    }

    pub fn from_moves(game: &Game, moves: &[(ActionId, u32)]) -> Script {
        Script {
            steps: moves
                .iter()
                .map(|&(a, input)| ScriptStep::Action {
                    action: game.action_name(a).unwrap_or_default().to_string(),
                    input,
                })
                .collect(),
        }
    }

    /// Avatar actions for `game`.
    pub fn actions(&self, game: &Game) -> Result<Vec<PlayerAction>, Error> {
        self.steps
            .iter()
            .enumerate()
            .map(|(i, step)| match step {
                ScriptStep::NoOp => Ok(PlayerAction::NoOp),
                ScriptStep::Action { action, input } => {
                    let id = game.action_id(action).ok_or_else(|| Error::Solution {
                        line: i + 1,
                        message: format!("unknown action '{action}'"),
                    })?;
                    Ok(PlayerAction::Avatar { action: id, input: *input })
                }
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Script {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            match step {
                ScriptStep::NoOp => writeln!(f, "noop")?,
                ScriptStep::Action { action, input } => writeln!(f, "{action} {input}")?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub moves: Vec<(ActionId, u32)>,
    pub explored: usize,
}

/// Shortest input sequence for player 1's avatar that wins `level`, or
/// `None` when no win is reachable within `limit` distinct states.
pub fn solve(game: &Game, level: usize, limit: usize) -> Result<Option<Solution>, Error> {
    let avatar_type = game.avatar_type();
    let start = GridState::new(game, level)?;
    let moves: Vec<(ActionId, u32)> = (0..game.action_count())
        .flat_map(|a| game.inputs(a).iter().map(move |i| (a, i.id)))
        .collect();

    struct Node {
        state: GridState,
        parent: usize,
        step: (ActionId, u32),
    }
    let mut seen = HashSet::from([start.digest(game)]);
    let mut nodes = vec![Node {
        state: start,
        parent: usize::MAX,
        step: (0, 0),
    }];
    let mut head = 0;
    while head < nodes.len() {
        if seen.len() > limit {
            return Ok(None);
        }
        let current = head;
        head += 1;
        let Some(source) = avatar_type.and_then(|t| nodes[current].state.find(t, 1)) else {
            continue;
        };
        for &(action, input) in &moves {
            let mut next = nodes[current].state.clone();
            let out = next.apply_action(game, source, action, input, 1)?;
            if !out.mutated || !seen.insert(next.digest(game)) {
                continue;
            }
            match next.check_termination(game) {
                Status::Won(1) => {
                    let mut path = vec![(action, input)];
                    let mut at = current;
                    while at != 0 {
                        path.push(nodes[at].step);
                        at = nodes[at].parent;
                    }
                    path.reverse();
                    return Ok(Some(Solution {
                        moves: path,
                        explored: seen.len(),
                    }));
                }
                Status::Ongoing => nodes.push(Node {
                    state: next,
                    parent: current,
                    step: (action, input),
                }),
                // Lost and ended states are not expanded.
                _ => {}
            }
        }
    }
    Ok(None)
}
