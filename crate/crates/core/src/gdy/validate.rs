use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Command, Condition, Expr, GameDescription, ObjectType, Target, EMPTY, RESERVED};
use crate::yaml::Mark;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    /// Dotted schema path, e.g. `Environment.Player.AvatarObject`.
    pub path: String,
    pub message: String,
    pub mark: Option<Mark>,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let level = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match self.mark {
            Some(m) => write!(f, "{level} at {m} ({}): {}", self.path, self.message),
            None => write!(f, "{level} ({}): {}", self.path, self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub diagnostics: Vec<Diagnostic>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.diagnostics.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }

    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    fn error(&mut self, path: impl Into<String>, message: impl Into<String>) {
        self.diagnostics.push(Diagnostic {
            severity: Severity::Error,
            path: path.into(),
            message: message.into(),
            mark: None,
        });
    }
}

fn is_reserved(name: &str) -> bool {
    RESERVED.contains(&name)
}

/// Checks every structural and cross-reference invariant of a description.
/// An empty report means the description is usable by the engine.
pub fn validate(desc: &GameDescription) -> ValidationReport {
    let mut r = ValidationReport::default();

    if desc.name.trim().is_empty() {
        r.error("Environment.Name", "environment name must not be empty");
    }
    if desc.tile_size == 0 {
        r.error("Environment.TileSize", "tile size must be positive");
    }

    check_variables(&mut r, "Environment.Variables", desc.variables.iter().map(|v| v.name.as_str()));
    check_objects(&mut r, desc);
    check_player(&mut r, desc);
    check_termination(&mut r, desc);
    check_actions(&mut r, desc);
    check_levels(&mut r, desc);
    r
}

fn check_variables<'a>(r: &mut ValidationReport, path: &str, names: impl Iterator<Item = &'a str>) {
    let mut seen = BTreeSet::new();
    for (i, name) in names.enumerate() {
        let p = format!("{path}[{i}].Name");
        if name.is_empty() {
            r.error(&p, "variable name must not be empty");
        } else if is_reserved(name) {
            r.error(&p, format!("'{name}' is a reserved token"));
        } else if name.contains(':') {
            r.error(&p, format!("variable name '{name}' must not contain ':'"));
        }
        if !seen.insert(name) {
            r.error(&p, format!("duplicate variable '{name}'"));
        }
    }
}

fn check_objects(r: &mut ValidationReport, desc: &GameDescription) {
    let mut names = BTreeSet::new();
    let mut chars = BTreeSet::new();
    for (i, obj) in desc.objects.iter().enumerate() {
        let p = format!("Objects[{i}]");
        if obj.name.is_empty() {
            r.error(format!("{p}.Name"), "object name must not be empty");
        } else if is_reserved(&obj.name) || obj.name.contains(':') {
            r.error(format!("{p}.Name"), format!("'{}' cannot be used as an object name", obj.name));
        }
        if !names.insert(obj.name.as_str()) {
            r.error(format!("{p}.Name"), format!("duplicate object name '{}'", obj.name));
        }
        let c = obj.map_character;
        if c == '.' || c.is_ascii_digit() || c.is_whitespace() || c.is_control() {
            r.error(format!("{p}.MapCharacter"), format!("'{c}' cannot be used as a map character"));
        }
        if !chars.insert(c) {
            r.error(
                format!("{p}.MapCharacter"),
                format!("map character '{c}' is already used by another object"),
            );
        }
        check_variables(
            r,
            &format!("{p}.Variables"),
            obj.variables.iter().map(|v| v.name.as_str()),
        );
    }
}

fn check_player(r: &mut ValidationReport, desc: &GameDescription) {
    let player = &desc.player;
    if player.count == 0 {
        r.error("Environment.Player.Count", "player count must be at least 1");
    }
    if let Some(avatar) = &player.avatar_object {
        if desc.object(avatar).is_none() {
            r.error(
                "Environment.Player.AvatarObject",
                format!("avatar object '{avatar}' is not defined in Objects"),
            );
        }
    }
    let obs = &player.observer;
    let p = "Environment.Player.Observer";
    if obs.rotate_with_avatar && !obs.track_avatar {
        r.error(format!("{p}.RotateWithAvatar"), "RotateWithAvatar requires TrackAvatar");
    }
    if obs.track_avatar && player.avatar_object.is_none() {
        r.error(format!("{p}.TrackAvatar"), "TrackAvatar requires Environment.Player.AvatarObject");
    }
    for (key, size) in [("Width", obs.width), ("Height", obs.height)] {
        if size == Some(0) {
            r.error(format!("{p}.{key}"), "window size must be positive");
        }
    }
    if let Some(w) = obs.width {
        if obs.offset_x.unsigned_abs() >= w {
            r.error(format!("{p}.OffsetX"), "|OffsetX| must be smaller than Width");
        }
    }
    if let Some(h) = obs.height {
        if obs.offset_y.unsigned_abs() >= h {
            r.error(format!("{p}.OffsetY"), "|OffsetY| must be smaller than Height");
        }
    }
}

fn check_termination(r: &mut ValidationReport, desc: &GameDescription) {
    let t = &desc.termination;
    for (key, list) in [("Win", &t.win), ("Lose", &t.lose), ("End", &t.end)] {
        for (i, cond) in list.iter().enumerate() {
            let p = format!("Environment.Termination.{key}[{i}]");
            check_condition(r, desc, &p, cond);
        }
    }
}

fn check_condition(r: &mut ValidationReport, desc: &GameDescription, path: &str, cond: &Condition) {
    let p = format!("{path}.{}", cond.op.keyword());
    for (i, expr) in [&cond.lhs, &cond.rhs].into_iter().enumerate() {
        check_expr(r, desc, None, &format!("{p}[{i}]"), expr);
    }
    if let Some(player) = cond.player {
        if player == 0 || player > desc.player.count {
            r.error(
                format!("{path}.Player"),
                format!("player {player} exceeds the player count {}", desc.player.count),
            );
        }
    }
}

/// `owner` is the object executing a command, whose own variables are also
/// in scope.
fn check_expr(r: &mut ValidationReport, desc: &GameDescription, owner: Option<&ObjectType>, path: &str, expr: &Expr) {
    match expr {
        Expr::Literal(_) | Expr::Steps => {}
        Expr::Count(object) => {
            if desc.object(object).is_none() {
                r.error(path, format!("'{object}:count' refers to an undefined object"));
            }
        }
        Expr::Variable(name) => {
            if !variable_in_scope(desc, owner, name) {
                r.error(path, format!("undefined variable '{name}'"));
            }
        }
    }
}

fn variable_in_scope(desc: &GameDescription, owner: Option<&ObjectType>, name: &str) -> bool {
    owner.is_some_and(|o| o.variables.iter().any(|v| v.name == name)) || desc.variables.iter().any(|v| v.name == name)
}

fn check_actions(r: &mut ValidationReport, desc: &GameDescription) {
    let mut names = BTreeSet::new();
    for (ai, action) in desc.actions.iter().enumerate() {
        let ap = format!("Actions[{ai}]");
        if action.name.is_empty() {
            r.error(format!("{ap}.Name"), "action name must not be empty");
        }
        if !names.insert(action.name.as_str()) {
            r.error(format!("{ap}.Name"), format!("duplicate action name '{}'", action.name));
        }

        let mut ids = BTreeSet::new();
        for input in &action.inputs {
            let ip = format!("{ap}.InputMapping.Inputs.{}", input.id);
            if input.id == 0 {
                r.error(&ip, "input id 0 is reserved for the no-op");
            }
            if !ids.insert(input.id) {
                r.error(&ip, format!("duplicate input id {}", input.id));
            }
            if let Some(v) = input.orientation_vector {
                if v.iter().any(|c| !(-1..=1).contains(c)) {
                    r.error(
                        format!("{ip}.OrientationVector"),
                        "orientation vector components must be -1, 0 or 1",
                    );
                }
            }
        }

        let mut pairs = BTreeSet::new();
        for (bi, b) in action.behaviours.iter().enumerate() {
            let bp = format!("{ap}.Behaviours[{bi}]");
            let src = desc.object(&b.src_object);
            if src.is_none() {
                r.error(
                    format!("{bp}.Src.Object"),
                    format!("source object '{}' is not defined in Objects", b.src_object),
                );
            }
            let dst = desc.object(&b.dst_object);
            if dst.is_none() && b.dst_object != EMPTY {
                r.error(
                    format!("{bp}.Dst.Object"),
                    format!("destination object '{}' is neither defined nor {EMPTY}", b.dst_object),
                );
            }
            if !pairs.insert((b.src_object.as_str(), b.dst_object.as_str())) {
                r.error(
                    &bp,
                    format!(
                        "duplicate behaviour for ({}, {}, {})",
                        action.name, b.src_object, b.dst_object
                    ),
                );
            }
            if b.dst_object == EMPTY && !b.dst_commands.is_empty() {
                r.error(format!("{bp}.Dst.Commands"), "an _empty destination cannot run commands");
            }
            check_commands(r, desc, src, &format!("{bp}.Src.Commands"), &b.src_commands);
            check_commands(r, desc, dst, &format!("{bp}.Dst.Commands"), &b.dst_commands);
        }
    }
}

fn check_commands(
    r: &mut ValidationReport,
    desc: &GameDescription,
    owner: Option<&ObjectType>,
    path: &str,
    commands: &[Command],
) {
    for (i, cmd) in commands.iter().enumerate() {
        let p = format!("{path}[{i}].{}", cmd.keyword());
        match cmd {
            Command::Mov(_) | Command::Rot | Command::Remove | Command::Reward(_) => {}
            Command::Spawn { object, .. } => {
                if desc.object(object).is_none() {
                    r.error(&p, format!("cannot spawn undefined object '{object}'"));
                }
            }
            Command::Incr(v) | Command::Decr(v) | Command::Set(v, _) => {
                if !variable_in_scope(desc, owner, v) {
                    r.error(&p, format!("undefined variable '{v}'"));
                }
            }
            Command::Cascade(t) => {
                if *t != Target::Dest {
                    r.error(&p, "cascade only accepts _dest");
                }
            }
            Command::Eq { lhs, rhs, commands } => {
                check_expr(r, desc, owner, &format!("{p}.Arguments[0]"), lhs);
                check_expr(r, desc, owner, &format!("{p}.Arguments[1]"), rhs);
                check_commands(r, desc, owner, &format!("{p}.Commands"), commands);
            }
        }
    }
}

fn check_levels(r: &mut ValidationReport, desc: &GameDescription) {
    let count = desc.player.count;
    for (li, text) in desc.levels.iter().enumerate() {
        let p = format!("Environment.Levels[{li}]");
        let layout = match super::parse_level(text, desc) {
            Ok(l) => l,
            Err(e) => {
                r.error(&p, format!("level {li}: {e}"));
                continue;
            }
        };
        if layout.width == 0 || layout.height == 0 {
            r.error(&p, format!("level {li} is empty"));
            continue;
        }
        let mut occupied = BTreeSet::new();
        for pl in &layout.placements {
            let z = desc.object(&pl.object).map_or(0, |o| o.z);
            if !occupied.insert((pl.x, pl.y, z)) {
                r.error(&p, format!("level {li}: two objects share cell ({}, {}) at z={z}", pl.x, pl.y));
            }
        }
        if let Some(avatar) = desc.player.avatar_object.as_ref().filter(|a| desc.object(a).is_some()) {
            let mut per_player = alloc::vec![0u32; count as usize + 1];
            for pl in layout.placements.iter().filter(|pl| &pl.object == avatar) {
                per_player[pl.owner as usize] += 1;
            }
            let total: u32 = per_player.iter().sum();
            if total != count || per_player[1..].iter().any(|&n| n != 1) {
                r.error(
                    &p,
                    format!(
                        "level {li} must contain exactly one '{avatar}' per player ({count}), found {total}"
                    ),
                );
            }
        }
    }
}
