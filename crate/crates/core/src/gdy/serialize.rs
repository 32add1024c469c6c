use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use super::{
    ActionDefinition, Behaviour, Command, Condition, GameDescription, ObjectType, ObserverConfig, VariableDef,
};
use crate::yaml::{self, Node, ScalarStyle};

/// Writes a description as GDY text that parses back to an equal value.
pub fn serialize(desc: &GameDescription) -> String {
    yaml::emit(&to_yaml(desc))
}

fn s(text: impl Into<String>) -> Node {
    Node::plain(text)
}

fn int(v: impl ToString) -> Node {
    Node::plain(v.to_string())
}

fn vec2(v: [i32; 2]) -> Node {
    Node::sequence(vec![int(v[0]), int(v[1])])
}

fn map(entries: Vec<(&str, Node)>) -> Node {
    Node::mapping(entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect())
}

pub fn to_yaml(desc: &GameDescription) -> Node {
    let mut env = vec![("Name", s(&desc.name)), ("TileSize", int(desc.tile_size))];
    if !desc.variables.is_empty() {
        env.push(("Variables", variables(&desc.variables)));
    }

    let mut player = vec![("Count", int(desc.player.count))];
    if let Some(avatar) = &desc.player.avatar_object {
        player.push(("AvatarObject", s(avatar)));
    }
    if desc.player.observer != ObserverConfig::default() {
        player.push(("Observer", observer(&desc.player.observer)));
    }
    env.push(("Player", map(player)));

    let t = &desc.termination;
    let mut termination = Vec::new();
    for (key, list) in [("Win", &t.win), ("Lose", &t.lose), ("End", &t.end)] {
        if !list.is_empty() {
            termination.push((key, Node::sequence(list.iter().map(condition).collect())));
        }
    }
    if !termination.is_empty() {
        env.push(("Termination", map(termination)));
    }
    env.push((
        "Levels",
        Node::sequence(
            desc.levels
                .iter()
                .map(|l| Node::scalar(l.as_str(), ScalarStyle::Literal))
                .collect(),
        ),
    ));

    map(vec![
        ("Environment", map(env)),
        ("Objects", Node::sequence(desc.objects.iter().map(object).collect())),
        ("Actions", Node::sequence(desc.actions.iter().map(action).collect())),
    ])
}

fn variables(vars: &[VariableDef]) -> Node {
    Node::sequence(
        vars.iter()
            .map(|v| map(vec![("Name", s(&v.name)), ("InitialValue", int(v.initial))]))
            .collect(),
    )
}

fn observer(o: &ObserverConfig) -> Node {
    let mut e = Vec::new();
    if let Some(w) = o.width {
        e.push(("Width", int(w)));
    }
    if let Some(h) = o.height {
        e.push(("Height", int(h)));
    }
    e.push(("OffsetX", int(o.offset_x)));
    e.push(("OffsetY", int(o.offset_y)));
    e.push(("TrackAvatar", s(if o.track_avatar { "true" } else { "false" })));
    e.push(("RotateWithAvatar", s(if o.rotate_with_avatar { "true" } else { "false" })));
    map(e)
}

fn condition(c: &Condition) -> Node {
    let mut e = vec![(
        c.op.keyword(),
        Node::sequence(vec![s(c.lhs.to_string()), s(c.rhs.to_string())]),
    )];
    if let Some(p) = c.player {
        e.push(("Player", int(p)));
    }
    map(e)
}

fn object(o: &ObjectType) -> Node {
    let mut e = vec![
        ("Name", s(&o.name)),
        ("MapCharacter", s(o.map_character.to_string())),
        ("Z", int(o.z)),
    ];
    if !o.variables.is_empty() {
        e.push(("Variables", variables(&o.variables)));
    }
    if let Some(block) = &o.block {
        let color = block
            .color
            .iter()
            .map(|&c| s(format!("{}", c as f64 / 255.0)))
            .collect();
        e.push((
            "Observers",
            map(vec![(
                "Block2D",
                map(vec![("Shape", s(block.shape.keyword())), ("Color", Node::sequence(color))]),
            )]),
        ));
    }
    map(e)
}

fn action(a: &ActionDefinition) -> Node {
    let inputs = a
        .inputs
        .iter()
        .map(|i| {
            let mut e = vec![("Description", s(&i.description))];
            if let Some(v) = i.orientation_vector {
                e.push(("OrientationVector", vec2(v)));
            }
            if let Some(v) = i.vector_to_dest {
                e.push(("VectorToDest", vec2(v)));
            }
            (i.id.to_string(), map(e))
        })
        .collect();
    map(vec![
        ("Name", s(&a.name)),
        (
            "InputMapping",
            map(vec![
                ("Inputs", Node::mapping(inputs)),
                ("Relative", s(if a.relative { "true" } else { "false" })),
            ]),
        ),
        ("Behaviours", Node::sequence(a.behaviours.iter().map(behaviour).collect())),
    ])
}

fn behaviour(b: &Behaviour) -> Node {
    let side = |object: &str, commands: &[Command]| {
        let mut e = vec![("Object", s(object))];
        if !commands.is_empty() {
            e.push(("Commands", command_list(commands)));
        }
        map(e)
    };
    map(vec![
        ("Src", side(&b.src_object, &b.src_commands)),
        ("Dst", side(&b.dst_object, &b.dst_commands)),
    ])
}

fn command_list(commands: &[Command]) -> Node {
    Node::sequence(commands.iter().map(command).collect())
}

fn command(c: &Command) -> Node {
    let value = match c {
        Command::Mov(t) | Command::Cascade(t) => s(t.keyword()),
        Command::Rot => s("_dir"),
        Command::Remove => s("true"),
        Command::Spawn { object, at } => Node::sequence(vec![s(object), s(at.keyword())]),
        Command::Incr(v) | Command::Decr(v) => s(v),
        Command::Set(v, n) => Node::sequence(vec![s(v), int(n)]),
        Command::Reward(n) => int(n),
        Command::Eq { lhs, rhs, commands } => map(vec![
            ("Arguments", Node::sequence(vec![s(lhs.to_string()), s(rhs.to_string())])),
            ("Commands", command_list(commands)),
        ]),
    };
    map(vec![(c.keyword(), value)])
}
