//! Maps a YAML node tree onto [`GameDescription`], reporting unknown keys and
//! wrongly typed values as schema errors.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{
    ActionDefinition, Behaviour, BlockRender, Command, CompareOp, Condition, Diagnostic, Expr, GameDescription,
    GdyError, InputMapping, ObjectType, ObserverConfig, ParsedGdy, PlayerConfig, Severity, Shape, Target,
    TerminationConfig, VariableDef, DEFAULT_TILE_SIZE,
};
use crate::yaml::{Entry, Mark, Node, NodeKind};

type Result<T> = core::result::Result<T, GdyError>;

/// Asset keys for the sprite and isometric renderers, accepted and ignored.
const IGNORED_ENVIRONMENT_KEYS: [&str; 2] = ["BackgroundTile", "IsometricBackgroundTile"];
const IGNORED_OBSERVER_KEYS: [&str; 2] = ["Sprite2D", "Isometric"];

pub(super) fn build(root: &Node) -> Result<ParsedGdy> {
    let mut b = Builder {
        warnings: Vec::new(),
        marks: BTreeMap::new(),
    };
    let description = b.document(root)?;
    Ok(ParsedGdy {
        description,
        warnings: b.warnings,
        marks: b.marks,
    })
}

struct Builder {
    warnings: Vec<Diagnostic>,
    marks: BTreeMap<String, Mark>,
}

fn schema_error<T>(path: &str, mark: Mark, message: impl Into<String>) -> Result<T> {
    Err(GdyError::Schema {
        path: path.to_string(),
        mark,
        message: message.into(),
    })
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn index(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

/// Fields of one mapping, looked up by key. Unknown keys are reported when
/// the mapping is finished.
struct Fields<'n> {
    path: String,
    mark: Mark,
    entries: &'n [Entry],
    used: Vec<bool>,
}

impl<'n> Fields<'n> {
    fn new(node: &'n Node, path: &str) -> Result<Self> {
        let Some(entries) = node.as_mapping() else {
            if node.is_null() {
                return Ok(Fields {
                    path: path.to_string(),
                    mark: node.mark,
                    entries: &[],
                    used: Vec::new(),
                });
            }
            return schema_error(path, node.mark, format!("expected a mapping, found a {}", node.kind_name()));
        };
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|prev| prev.key == e.key) {
                return schema_error(&join(path, &e.key), e.key_mark, format!("duplicate key '{}'", e.key));
            }
        }
        Ok(Fields {
            path: path.to_string(),
            mark: node.mark,
            entries,
            used: alloc::vec![false; entries.len()],
        })
    }

    fn take(&mut self, key: &str) -> Option<&'n Node> {
        let i = self.entries.iter().position(|e| e.key == key)?;
        self.used[i] = true;
        Some(&self.entries[i].value)
    }

    fn require(&mut self, key: &str) -> Result<&'n Node> {
        match self.take(key) {
            Some(n) => Ok(n),
            None => schema_error(&self.path, self.mark, format!("missing required key '{key}'")),
        }
    }

    fn path(&self, key: &str) -> String {
        join(&self.path, key)
    }

    /// Consumes `keys` with a warning instead of an error.
    fn ignore(&mut self, keys: &[&str], warnings: &mut Vec<Diagnostic>) {
        for key in keys {
            if let Some(i) = self.entries.iter().position(|e| e.key == *key) {
                self.used[i] = true;
                warnings.push(Diagnostic {
                    severity: Severity::Warning,
                    path: self.path(key),
                    message: format!("'{key}' configures an unsupported renderer and is ignored"),
                    mark: Some(self.entries[i].key_mark),
                });
            }
        }
    }

    fn finish(self, allowed: &[&str]) -> Result<()> {
        for (e, used) in self.entries.iter().zip(&self.used) {
            if !used {
                return schema_error(
                    &join(&self.path, &e.key),
                    e.key_mark,
                    format!("unknown key '{}' (expected one of: {})", e.key, allowed.join(", ")),
                );
            }
        }
        Ok(())
    }
}

fn scalar<'n>(node: &'n Node, path: &str) -> Result<&'n str> {
    match node.as_scalar() {
        Some(s) => Ok(s),
        None => schema_error(path, node.mark, format!("expected a scalar, found a {}", node.kind_name())),
    }
}

fn string(node: &Node, path: &str) -> Result<String> {
    if node.is_null() {
        return Ok(String::new());
    }
    scalar(node, path).map(ToString::to_string)
}

fn integer(node: &Node, path: &str) -> Result<i64> {
    let s = scalar(node, path)?;
    match s.trim().parse::<i64>() {
        Ok(v) => Ok(v),
        Err(_) => schema_error(path, node.mark, format!("expected an integer, found '{s}'")),
    }
}

fn unsigned(node: &Node, path: &str) -> Result<u32> {
    let v = integer(node, path)?;
    u32::try_from(v).or_else(|_| schema_error(path, node.mark, format!("expected a non-negative integer, found {v}")))
}

fn positive(node: &Node, path: &str) -> Result<u32> {
    let v = unsigned(node, path)?;
    if v == 0 {
        return schema_error(path, node.mark, "expected a positive integer");
    }
    Ok(v)
}

fn boolean(node: &Node, path: &str) -> Result<bool> {
    match scalar(node, path)? {
        "true" | "True" | "TRUE" => Ok(true),
        "false" | "False" | "FALSE" => Ok(false),
        s => schema_error(path, node.mark, format!("expected true or false, found '{s}'")),
    }
}

fn sequence<'n>(node: &'n Node, path: &str) -> Result<&'n [Node]> {
    if node.is_null() {
        return Ok(&[]);
    }
    match node.as_sequence() {
        Some(items) => Ok(items),
        None => schema_error(path, node.mark, format!("expected a sequence, found a {}", node.kind_name())),
    }
}

fn vector(node: &Node, path: &str) -> Result<[i32; 2]> {
    let items = sequence(node, path)?;
    if items.len() != 2 {
        return schema_error(path, node.mark, "expected a two-element vector [x, y]");
    }
    let x = integer(&items[0], &index(path, 0))?;
    let y = integer(&items[1], &index(path, 1))?;
    match (i32::try_from(x), i32::try_from(y)) {
        (Ok(x), Ok(y)) => Ok([x, y]),
        _ => schema_error(path, node.mark, "vector component out of range"),
    }
}

impl Builder {
    fn mark(&mut self, path: &str, mark: Mark) {
        self.marks.insert(path.to_string(), mark);
    }

    fn document(&mut self, root: &Node) -> Result<GameDescription> {
        let mut top = Fields::new(root, "")?;
        let env_node = top.require("Environment")?;
        let objects_node = top.take("Objects");
        let actions_node = top.take("Actions");
        top.finish(&["Environment", "Objects", "Actions"])?;

        let mut desc = self.environment(env_node)?;
        if let Some(node) = objects_node {
            self.mark("Objects", node.mark);
            for (i, item) in sequence(node, "Objects")?.iter().enumerate() {
                let obj = self.object(item, &index("Objects", i))?;
                desc.objects.push(obj);
            }
        }
        if let Some(node) = actions_node {
            self.mark("Actions", node.mark);
            for (i, item) in sequence(node, "Actions")?.iter().enumerate() {
                let action = self.action(item, &index("Actions", i))?;
                desc.actions.push(action);
            }
        }
        Ok(desc)
    }

    fn environment(&mut self, node: &Node) -> Result<GameDescription> {
        let path = "Environment";
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        f.ignore(&IGNORED_ENVIRONMENT_KEYS, &mut self.warnings);
        let name_node = f.require("Name")?;
        let name = string(name_node, &f.path("Name"))?;
        self.mark(&f.path("Name"), name_node.mark);
        let tile_size = match f.take("TileSize") {
            Some(n) => positive(n, &f.path("TileSize"))?,
            None => DEFAULT_TILE_SIZE,
        };
        let variables = match f.take("Variables") {
            Some(n) => self.variables(n, &f.path("Variables"))?,
            None => Vec::new(),
        };
        let player = match f.take("Player") {
            Some(n) => self.player(n, &f.path("Player"))?,
            None => PlayerConfig::default(),
        };
        let termination = match f.take("Termination") {
            Some(n) => self.termination(n, &f.path("Termination"))?,
            None => TerminationConfig::default(),
        };
        let mut levels = Vec::new();
        if let Some(n) = f.take("Levels") {
            let lpath = f.path("Levels");
            self.mark(&lpath, n.mark);
            for (i, item) in sequence(n, &lpath)?.iter().enumerate() {
                let p = index(&lpath, i);
                self.mark(&p, item.mark);
                levels.push(String::from(scalar(item, &p)?));
            }
        }
        f.finish(&[
            "Name",
            "TileSize",
            "Variables",
            "Player",
            "Termination",
            "Levels",
            "BackgroundTile",
            "IsometricBackgroundTile",
        ])?;
        Ok(GameDescription {
            name,
            tile_size,
            player,
            termination,
            variables,
            levels,
            objects: Vec::new(),
            actions: Vec::new(),
        })
    }

    fn variables(&mut self, node: &Node, path: &str) -> Result<Vec<VariableDef>> {
        self.mark(path, node.mark);
        let mut out = Vec::new();
        for (i, item) in sequence(node, path)?.iter().enumerate() {
            let p = index(path, i);
            self.mark(&p, item.mark);
            let mut f = Fields::new(item, &p)?;
            let name = string(f.require("Name")?, &f.path("Name"))?;
            let initial = match f.take("InitialValue") {
                Some(n) => integer(n, &f.path("InitialValue"))?,
                None => 0,
            };
            f.finish(&["Name", "InitialValue"])?;
            out.push(VariableDef { name, initial });
        }
        Ok(out)
    }

    fn player(&mut self, node: &Node, path: &str) -> Result<PlayerConfig> {
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        let count = match f.take("Count") {
            Some(n) => positive(n, &f.path("Count"))?,
            None => 1,
        };
        let avatar_object = match f.take("AvatarObject") {
            Some(n) => {
                self.mark(&f.path("AvatarObject"), n.mark);
                Some(string(n, &f.path("AvatarObject"))?)
            }
            None => None,
        };
        let observer = match f.take("Observer") {
            Some(n) => self.observer(n, &f.path("Observer"))?,
            None => ObserverConfig::default(),
        };
        f.finish(&["Count", "AvatarObject", "Observer"])?;
        Ok(PlayerConfig {
            count,
            avatar_object,
            observer,
        })
    }

    fn observer(&mut self, node: &Node, path: &str) -> Result<ObserverConfig> {
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        let mut cfg = ObserverConfig::default();
        if let Some(n) = f.take("Width") {
            cfg.width = Some(positive(n, &f.path("Width"))?);
        }
        if let Some(n) = f.take("Height") {
            cfg.height = Some(positive(n, &f.path("Height"))?);
        }
        for (key, slot) in [("OffsetX", &mut cfg.offset_x), ("OffsetY", &mut cfg.offset_y)] {
            if let Some(n) = f.take(key) {
                let p = f.path(key);
                let v = integer(n, &p)?;
                *slot = i32::try_from(v).or_else(|_| schema_error(&p, n.mark, "offset out of range"))?;
            }
        }
        if let Some(n) = f.take("TrackAvatar") {
            cfg.track_avatar = boolean(n, &f.path("TrackAvatar"))?;
        }
        if let Some(n) = f.take("RotateWithAvatar") {
            cfg.rotate_with_avatar = boolean(n, &f.path("RotateWithAvatar"))?;
        }
        f.finish(&["Width", "Height", "OffsetX", "OffsetY", "TrackAvatar", "RotateWithAvatar"])?;
        Ok(cfg)
    }

    fn termination(&mut self, node: &Node, path: &str) -> Result<TerminationConfig> {
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        let mut out = TerminationConfig::default();
        for (key, list) in [("Win", &mut out.win), ("Lose", &mut out.lose), ("End", &mut out.end)] {
            if let Some(n) = f.take(key) {
                let p = f.path(key);
                self.mark(&p, n.mark);
                for (i, item) in sequence(n, &p)?.iter().enumerate() {
                    list.push(self.condition(item, &index(&p, i))?);
                }
            }
        }
        f.finish(&["Win", "Lose", "End"])?;
        Ok(out)
    }

    fn condition(&mut self, node: &Node, path: &str) -> Result<Condition> {
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        let player = match f.take("Player") {
            Some(n) => Some(positive(n, &f.path("Player"))?),
            None => None,
        };
        let mut found = None;
        for op in CompareOp::ALL {
            if let Some(n) = f.take(op.keyword()) {
                if found.is_some() {
                    return schema_error(path, node.mark, "a condition has exactly one comparison");
                }
                found = Some((op, n));
            }
        }
        f.finish(&["eq", "neq", "gt", "lt", "Player"])?;
        let Some((op, args)) = found else {
            return schema_error(path, node.mark, "expected one of eq, neq, gt, lt");
        };
        let (lhs, rhs) = arguments(args, &join(path, op.keyword()))?;
        Ok(Condition { op, lhs, rhs, player })
    }

    fn object(&mut self, node: &Node, path: &str) -> Result<ObjectType> {
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        let name_node = f.require("Name")?;
        self.mark(&f.path("Name"), name_node.mark);
        let name = string(name_node, &f.path("Name"))?;
        let char_node = f.require("MapCharacter")?;
        let char_path = f.path("MapCharacter");
        self.mark(&char_path, char_node.mark);
        let text = scalar(char_node, &char_path)?;
        let mut chars = text.chars();
        let map_character = match (chars.next(), chars.next()) {
            (Some(c), None) => c,
            _ => return schema_error(&char_path, char_node.mark, "MapCharacter must be exactly one character"),
        };
        let z = match f.take("Z") {
            Some(n) => unsigned(n, &f.path("Z"))?,
            None => 0,
        };
        let variables = match f.take("Variables") {
            Some(n) => self.variables(n, &f.path("Variables"))?,
            None => Vec::new(),
        };
        let block = match f.take("Observers") {
            Some(n) => self.object_observers(n, &f.path("Observers"))?,
            None => None,
        };
        f.finish(&["Name", "MapCharacter", "Z", "Variables", "Observers"])?;
        Ok(ObjectType {
            name,
            map_character,
            z,
            variables,
            block,
        })
    }

    fn object_observers(&mut self, node: &Node, path: &str) -> Result<Option<BlockRender>> {
        let mut f = Fields::new(node, path)?;
        f.ignore(&IGNORED_OBSERVER_KEYS, &mut self.warnings);
        let block = match f.take("Block2D") {
            Some(n) => Some(block_render(n, &f.path("Block2D"))?),
            None => None,
        };
        f.finish(&["Block2D", "Sprite2D", "Isometric"])?;
        Ok(block)
    }

    fn action(&mut self, node: &Node, path: &str) -> Result<ActionDefinition> {
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        let name_node = f.require("Name")?;
        self.mark(&f.path("Name"), name_node.mark);
        let name = string(name_node, &f.path("Name"))?;
        let mapping_node = f.require("InputMapping")?;
        let behaviours_node = f.take("Behaviours");
        f.finish(&["Name", "InputMapping", "Behaviours"])?;

        let mpath = join(path, "InputMapping");
        self.mark(&mpath, mapping_node.mark);
        let mut m = Fields::new(mapping_node, &mpath)?;
        let relative = match m.take("Relative") {
            Some(n) => boolean(n, &m.path("Relative"))?,
            None => false,
        };
        let mut inputs = Vec::new();
        if let Some(n) = m.take("Inputs") {
            let ipath = m.path("Inputs");
            self.mark(&ipath, n.mark);
            // Duplicate ids are kept here and reported by validation.
            let entries = match n.as_mapping() {
                Some(e) => e,
                None if n.is_null() => &[],
                None => return schema_error(&ipath, n.mark, "Inputs must be a mapping of input id to input"),
            };
            for e in entries {
                let p = join(&ipath, &e.key);
                let Ok(id) = e.key.trim().parse::<u32>() else {
                    return schema_error(&p, e.key_mark, format!("input id '{}' is not a non-negative integer", e.key));
                };
                self.mark(&p, e.key_mark);
                inputs.push(self.input(id, &e.value, &p)?);
            }
        }
        m.finish(&["Inputs", "Relative"])?;

        let mut behaviours = Vec::new();
        if let Some(n) = behaviours_node {
            let bpath = join(path, "Behaviours");
            self.mark(&bpath, n.mark);
            for (i, item) in sequence(n, &bpath)?.iter().enumerate() {
                behaviours.push(self.behaviour(item, &index(&bpath, i))?);
            }
        }
        Ok(ActionDefinition {
            name,
            relative,
            inputs,
            behaviours,
        })
    }

    fn input(&mut self, id: u32, node: &Node, path: &str) -> Result<InputMapping> {
        let mut f = Fields::new(node, path)?;
        let description = match f.take("Description") {
            Some(n) => string(n, &f.path("Description"))?,
            None => String::new(),
        };
        let orientation_vector = match f.take("OrientationVector") {
            Some(n) => Some(vector(n, &f.path("OrientationVector"))?),
            None => None,
        };
        let vector_to_dest = match f.take("VectorToDest") {
            Some(n) => Some(vector(n, &f.path("VectorToDest"))?),
            None => None,
        };
        f.finish(&["Description", "OrientationVector", "VectorToDest"])?;
        Ok(InputMapping {
            id,
            description,
            orientation_vector,
            vector_to_dest,
        })
    }

    fn behaviour(&mut self, node: &Node, path: &str) -> Result<Behaviour> {
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        let src = f.require("Src")?;
        let dst = f.require("Dst")?;
        f.finish(&["Src", "Dst"])?;
        let (src_object, src_commands) = self.side(src, &join(path, "Src"))?;
        let (dst_object, dst_commands) = self.side(dst, &join(path, "Dst"))?;
        Ok(Behaviour {
            src_object,
            dst_object,
            src_commands,
            dst_commands,
        })
    }

    fn side(&mut self, node: &Node, path: &str) -> Result<(String, Vec<Command>)> {
        self.mark(path, node.mark);
        let mut f = Fields::new(node, path)?;
        let object_node = f.require("Object")?;
        self.mark(&f.path("Object"), object_node.mark);
        let object = string(object_node, &f.path("Object"))?;
        let commands = match f.take("Commands") {
            Some(n) => commands(n, &f.path("Commands"))?,
            None => Vec::new(),
        };
        f.finish(&["Object", "Commands"])?;
        Ok((object, commands))
    }
}

fn arguments(node: &Node, path: &str) -> Result<(Expr, Expr)> {
    let items = sequence(node, path)?;
    if items.len() != 2 {
        return schema_error(path, node.mark, "expected two arguments [lhs, rhs]");
    }
    Ok((
        Expr::parse(scalar(&items[0], &index(path, 0))?),
        Expr::parse(scalar(&items[1], &index(path, 1))?),
    ))
}

fn block_render(node: &Node, path: &str) -> Result<BlockRender> {
    let node = match node.as_sequence() {
        Some([single]) => single,
        Some(_) => return schema_error(path, node.mark, "Block2D takes a single shape definition"),
        None => node,
    };
    let mut f = Fields::new(node, path)?;
    let shape_node = f.require("Shape")?;
    let shape_text = scalar(shape_node, &f.path("Shape"))?;
    let Some(shape) = Shape::from_keyword(shape_text) else {
        return schema_error(
            &f.path("Shape"),
            shape_node.mark,
            format!("unknown shape '{shape_text}' (expected square, circle or triangle)"),
        );
    };
    let color_node = f.require("Color")?;
    let cpath = f.path("Color");
    let items = sequence(color_node, &cpath)?;
    if items.len() != 3 {
        return schema_error(&cpath, color_node.mark, "Color must be [r, g, b] with components in 0..1");
    }
    let mut color = [0u8; 3];
    for (i, item) in items.iter().enumerate() {
        let text = scalar(item, &index(&cpath, i))?;
        match text.trim().parse::<f64>() {
            Ok(v) if (0.0..=1.0).contains(&v) => color[i] = (v * 255.0 + 0.5) as u8,
            _ => return schema_error(&index(&cpath, i), item.mark, "colour components must be numbers in 0..1"),
        }
    }
    f.finish(&["Shape", "Color"])?;
    Ok(BlockRender { shape, color })
}

const COMMANDS: &str = "mov, rot, remove, spawn, incr, decr, set, reward, cascade, eq";

fn commands(node: &Node, path: &str) -> Result<Vec<Command>> {
    let mut out = Vec::new();
    for (i, item) in sequence(node, path)?.iter().enumerate() {
        out.push(command(item, &index(path, i))?);
    }
    Ok(out)
}

fn target(node: &Node, path: &str) -> Result<Target> {
    let s = scalar(node, path)?;
    Target::from_keyword(s).map_or_else(
        || schema_error(path, node.mark, format!("expected _dest or _src, found '{s}'")),
        Ok,
    )
}

fn command(node: &Node, path: &str) -> Result<Command> {
    let entries = match node.as_mapping() {
        Some(e) if e.len() == 1 => e,
        _ => {
            return schema_error(
                path,
                node.mark,
                format!("a command is a single-key mapping ({COMMANDS})"),
            )
        }
    };
    let Entry { key, key_mark, value } = &entries[0];
    let p = join(path, key);
    let cmd = match key.as_str() {
        "mov" => Command::Mov(target(value, &p)?),
        "rot" => match scalar(value, &p)? {
            "_dir" => Command::Rot,
            s => return schema_error(&p, value.mark, format!("rot takes _dir, found '{s}'")),
        },
        "remove" => {
            if !value.is_null() && !boolean(value, &p)? {
                return schema_error(&p, value.mark, "remove takes true");
            }
            Command::Remove
        }
        "spawn" => match &value.kind {
            NodeKind::Scalar(..) => Command::Spawn {
                object: string(value, &p)?,
                at: Target::Dest,
            },
            NodeKind::Sequence(items) if items.len() == 2 => Command::Spawn {
                object: string(&items[0], &index(&p, 0))?,
                at: target(&items[1], &index(&p, 1))?,
            },
            _ => return schema_error(&p, value.mark, "spawn takes an object name or [object, _dest|_src]"),
        },
        "incr" => Command::Incr(string(value, &p)?),
        "decr" => Command::Decr(string(value, &p)?),
        "set" => {
            let items = sequence(value, &p)?;
            if items.len() != 2 {
                return schema_error(&p, value.mark, "set takes [variable, value]");
            }
            Command::Set(string(&items[0], &index(&p, 0))?, integer(&items[1], &index(&p, 1))?)
        }
        "reward" => Command::Reward(integer(value, &p)?),
        "cascade" => Command::Cascade(target(value, &p)?),
        "eq" => {
            let mut f = Fields::new(value, &p)?;
            let args = f.require("Arguments")?;
            let (lhs, rhs) = arguments(args, &f.path("Arguments"))?;
            let commands = match f.take("Commands") {
                Some(n) => commands(n, &f.path("Commands"))?,
                None => Vec::new(),
            };
            f.finish(&["Arguments", "Commands"])?;
            Command::Eq { lhs, rhs, commands }
        }
        other => {
            return schema_error(&p, *key_mark, format!("unknown command '{other}' (expected one of: {COMMANDS})"))
        }
    };
    Ok(cmd)
}
