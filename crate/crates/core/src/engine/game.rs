use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use super::EngineError;
use crate::gdy::{
    self, BlockRender, Command, CompareOp, Condition, Expr, GameDescription, ObjectType, Target,
};

pub type TypeId = usize;
pub type ActionId = usize;

/// Sentinel for "no instance" in cell slots and behaviour tables.
pub(crate) const NONE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct TypeInfo {
    pub name: String,
    pub map_character: char,
    pub z: u32,
    /// Index of `z` among the distinct z values, ascending.
    pub layer: usize,
    pub var_names: Vec<String>,
    pub var_initial: Vec<i64>,
    pub block: Option<BlockRender>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum VarRef {
    Own(usize),
    Global(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Operand {
    Literal(i64),
    Count(TypeId),
    Var(VarRef),
    Steps,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Op {
    Mov(Target),
    Rot,
    Remove,
    Spawn(TypeId, Target),
    Add(VarRef, i64),
    Set(VarRef, i64),
    Reward(i64),
    Cascade,
    If {
        op: CompareOp,
        lhs: Operand,
        rhs: Operand,
        body: Vec<Op>,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledBehaviour {
    pub src: Vec<Op>,
    pub dst: Vec<Op>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompiledInput {
    pub id: u32,
    pub orientation_vector: Option<[i32; 2]>,
    pub vector_to_dest: Option<[i32; 2]>,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledAction {
    pub relative: bool,
    pub inputs: Vec<CompiledInput>,
    /// `[src * (types + 1) + dst]`, where `dst == types` is an empty cell.
    pub table: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct CompiledCondition {
    pub op: CompareOp,
    pub lhs: Operand,
    pub rhs: Operand,
    pub player: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct CompiledLevel {
    pub width: u32,
    pub height: u32,
    /// `(type, x, y, owner)` in level-string order.
    pub placements: Vec<(TypeId, i32, i32, u32)>,
}

/// A validated description lowered to index-based tables.
#[derive(Debug, Clone)]
pub struct Game {
    desc: GameDescription,
    pub(crate) types: Vec<TypeInfo>,
    pub(crate) layer_z: Vec<u32>,
    pub(crate) global_initial: Vec<i64>,
    pub(crate) actions: Vec<CompiledAction>,
    pub(crate) behaviours: Vec<CompiledBehaviour>,
    pub(crate) win: Vec<CompiledCondition>,
    pub(crate) lose: Vec<CompiledCondition>,
    pub(crate) end: Vec<CompiledCondition>,
    pub(crate) levels: Vec<CompiledLevel>,
    pub(crate) avatar: Option<TypeId>,
}

impl Game {
    pub fn new(desc: GameDescription) -> Result<Self, EngineError> {
        let report = gdy::validate(&desc);
        if report.has_errors() {
            return Err(EngineError::Invalid(report));
        }

        let layer_z: Vec<u32> = desc.objects.iter().map(|o| o.z).collect::<BTreeSet<_>>().into_iter().collect();
        let types: Vec<TypeInfo> = desc
            .objects
            .iter()
            .map(|o| TypeInfo {
                name: o.name.clone(),
                map_character: o.map_character,
                z: o.z,
                layer: layer_z.binary_search(&o.z).unwrap_or(0),
                var_names: o.variables.iter().map(|v| v.name.clone()).collect(),
                var_initial: o.variables.iter().map(|v| v.initial).collect(),
                block: o.block,
            })
            .collect();

        let n = types.len();
        let mut actions = Vec::new();
        let mut behaviours = Vec::new();
        for action in &desc.actions {
            let mut table = alloc::vec![NONE; n * (n + 1)];
            for b in &action.behaviours {
                let src = desc.object_index(&b.src_object).unwrap_or(0);
                let dst = desc.object_index(&b.dst_object).unwrap_or(n);
                let src_obj = &desc.objects[src];
                let dst_obj = desc.objects.get(dst);
                table[src * (n + 1) + dst] = behaviours.len() as u32;
                behaviours.push(CompiledBehaviour {
                    src: ops(&desc, Some(src_obj), &b.src_commands),
                    dst: ops(&desc, dst_obj, &b.dst_commands),
                });
            }
            let inputs = action
                .inputs
                .iter()
                .map(|i| CompiledInput {
                    id: i.id,
                    orientation_vector: i.orientation_vector,
                    vector_to_dest: i.vector_to_dest,
                })
                .collect();
            actions.push(CompiledAction {
                relative: action.relative,
                inputs,
                table,
            });
        }

        let t = &desc.termination;
        let compile = |list: &[Condition]| list.iter().map(|c| condition(&desc, c)).collect();
        let (win, lose, end) = (compile(&t.win), compile(&t.lose), compile(&t.end));

        let mut levels = Vec::new();
        for i in 0..desc.levels.len() {
            let layout = desc
                .level_layout(i)
                .and_then(Result::ok)
                .expect("levels parse after validation");
            levels.push(CompiledLevel {
                width: layout.width,
                height: layout.height,
                placements: layout
                    .placements
                    .iter()
                    .map(|p| {
                        let t = desc.object_index(&p.object).unwrap_or(0);
                        (t, p.x as i32, p.y as i32, p.owner)
                    })
                    .collect(),
            });
        }
        Ok(Game {
            global_initial: desc.variables.iter().map(|v| v.initial).collect(),
            avatar: desc.player.avatar_object.as_deref().and_then(|a| desc.object_index(a)),
            types,
            layer_z,
            actions,
            behaviours,
            win,
            lose,
            end,
            levels,
            desc,
        })
    }

    pub fn description(&self) -> &GameDescription {
        &self.desc
    }

    pub fn name(&self) -> &str {
        &self.desc.name
    }

    /// Object types in definition order; this is the vector channel order.
    pub fn types(&self) -> &[TypeInfo] {
        &self.types
    }

    pub fn type_id(&self, name: &str) -> Option<TypeId> {
        self.types.iter().position(|t| t.name == name)
    }

    pub fn avatar_type(&self) -> Option<TypeId> {
        self.avatar
    }

    pub fn player_count(&self) -> u32 {
        self.desc.player.count
    }

    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Grid size of a level, or `None` when out of range.
    pub fn level_size(&self, index: usize) -> Option<(u32, u32)> {
        self.levels.get(index).map(|l| (l.width, l.height))
    }

    /// Number of distinct z values.
    pub fn layers(&self) -> usize {
        self.layer_z.len().max(1)
    }

    pub fn action_count(&self) -> usize {
        self.actions.len()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.desc.actions.iter().position(|a| a.name == name)
    }

    pub fn action_name(&self, id: ActionId) -> Option<&str> {
        self.desc.actions.get(id).map(|a| a.name.as_str())
    }

    pub fn inputs(&self, id: ActionId) -> &[CompiledInput] {
        self.actions.get(id).map_or(&[], |a| &a.inputs)
    }

    pub fn global_names(&self) -> impl Iterator<Item = &str> {
        self.desc.variables.iter().map(|v| v.name.as_str())
    }
}

fn var_ref(desc: &GameDescription, owner: Option<&ObjectType>, name: &str) -> VarRef {
    if let Some(slot) = owner.and_then(|o| o.variables.iter().position(|v| v.name == name)) {
        return VarRef::Own(slot);
    }
    VarRef::Global(desc.variables.iter().position(|v| v.name == name).unwrap_or(0))
}

fn operand(desc: &GameDescription, owner: Option<&ObjectType>, e: &Expr) -> Operand {
    match e {
        Expr::Literal(v) => Operand::Literal(*v),
        Expr::Count(name) => Operand::Count(desc.object_index(name).unwrap_or(0)),
        Expr::Variable(name) => Operand::Var(var_ref(desc, owner, name)),
        Expr::Steps => Operand::Steps,
    }
}

fn condition(desc: &GameDescription, c: &Condition) -> CompiledCondition {
    CompiledCondition {
        op: c.op,
        lhs: operand(desc, None, &c.lhs),
        rhs: operand(desc, None, &c.rhs),
        player: c.player.unwrap_or(1),
    }
}

fn ops(desc: &GameDescription, owner: Option<&ObjectType>, commands: &[Command]) -> Vec<Op> {
    commands
        .iter()
        .map(|c| match c {
            Command::Mov(t) => Op::Mov(*t),
            Command::Rot => Op::Rot,
            Command::Remove => Op::Remove,
            Command::Spawn { object, at } => Op::Spawn(desc.object_index(object).unwrap_or(0), *at),
            Command::Incr(v) => Op::Add(var_ref(desc, owner, v), 1),
            Command::Decr(v) => Op::Add(var_ref(desc, owner, v), -1),
            Command::Set(v, n) => Op::Set(var_ref(desc, owner, v), *n),
            Command::Reward(n) => Op::Reward(*n),
            Command::Cascade(_) => Op::Cascade,
            Command::Eq { lhs, rhs, commands } => Op::If {
                op: CompareOp::Eq,
                lhs: operand(desc, owner, lhs),
                rhs: operand(desc, owner, rhs),
                body: ops(desc, owner, commands),
            },
        })
        .collect()
}
