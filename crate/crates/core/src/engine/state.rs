use alloc::vec::Vec;

use super::game::{CompiledCondition, Op, Operand, VarRef, NONE};
use super::{relative_transform, ActionId, Direction, EngineError, Fnv1a, Game, TypeId, MAX_CASCADE_DEPTH};
use crate::gdy::Target;

pub type InstanceId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Status {
    #[default]
    Ongoing,
    Won(u32),
    Lost(u32),
    Ended,
}

impl Status {
    pub fn is_over(self) -> bool {
        self != Status::Ongoing
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Instance {
    pub type_id: TypeId,
    pub x: i32,
    pub y: i32,
    pub orientation: Direction,
    /// Owning player, or 0.
    pub owner: u32,
    var_start: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ActionOutcome {
    pub succeeded: bool,
    /// Reward credited to the acting player.
    pub reward: i64,
    pub mutated: bool,
    pub spawned: u32,
    pub removed: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InvariantViolation {
    #[error("instance {id} at ({x}, {y}) is outside the grid")]
    OutOfBounds { id: InstanceId, x: i32, y: i32 },
    #[error("instance {id} is not recorded in its cell")]
    Unplaced { id: InstanceId },
    #[error("cell slot {slot} refers to instance {id}, which is elsewhere or removed")]
    StaleCell { slot: usize, id: InstanceId },
    #[error("type {type_id} count is {recorded}, but {actual} instances are live")]
    Count { type_id: TypeId, recorded: u32, actual: u32 },
}

/// Positions of the source and destination for one behaviour.
#[derive(Clone, Copy)]
struct Frame {
    src: (i32, i32),
    dest: (i32, i32),
}

#[derive(Clone, Copy)]
struct Resolution {
    action: ActionId,
    orientation: Option<[i32; 2]>,
    vector: [i32; 2],
    player: u32,
}

/// Complete world state of one episode.
#[derive(Debug, Clone)]
pub struct GridState {
    width: u32,
    height: u32,
    layers: usize,
    /// `(y * width + x) * layers + layer` → instance id or `NONE`.
    cells: Vec<u32>,
    instances: Vec<Option<Instance>>,
    vars: Vec<i64>,
    type_counts: Vec<u32>,
    globals: Vec<i64>,
    step_count: u64,
    /// Indexed by player id; slot 0 is unused.
    pending_rewards: Vec<i64>,
    status: Status,
    max_steps: Option<u64>,
}

impl GridState {
    pub fn new(game: &Game, level: usize) -> Result<Self, EngineError> {
        let mut state = GridState {
            width: 0,
            height: 0,
            layers: game.layers(),
            cells: Vec::new(),
            instances: Vec::new(),
            vars: Vec::new(),
            type_counts: Vec::new(),
            globals: Vec::new(),
            step_count: 0,
            pending_rewards: Vec::new(),
            status: Status::Ongoing,
            max_steps: None,
        };
        state.reset(game, level)?;
        Ok(state)
    }

    /// Reinitialises to a level, reusing existing buffers. The step limit is kept.
    pub fn reset(&mut self, game: &Game, level: usize) -> Result<(), EngineError> {
        let layout = game.levels.get(level).ok_or(EngineError::LevelOutOfRange {
            index: level,
            count: game.levels.len(),
        })?;
        self.width = layout.width;
        self.height = layout.height;
        self.layers = game.layers();
        self.cells.clear();
        self.cells
            .resize(layout.width as usize * layout.height as usize * self.layers, NONE);
        self.instances.clear();
        self.vars.clear();
        self.type_counts.clear();
        self.type_counts.resize(game.types.len(), 0);
        self.globals.clear();
        self.globals.extend_from_slice(&game.global_initial);
        self.step_count = 0;
        self.pending_rewards.clear();
        self.pending_rewards.resize(game.player_count() as usize + 1, 0);
        self.status = Status::Ongoing;
        for &(type_id, x, y, owner) in &layout.placements {
            self.create(game, type_id, x, y, owner);
        }
        Ok(())
    }

    fn create(&mut self, game: &Game, type_id: TypeId, x: i32, y: i32, owner: u32) -> InstanceId {
        let id = self.instances.len() as InstanceId;
        let info = &game.types[type_id];
        let var_start = self.vars.len() as u32;
        self.vars.extend_from_slice(&info.var_initial);
        self.instances.push(Some(Instance {
            type_id,
            x,
            y,
            orientation: Direction::Up,
            owner,
            var_start,
        }));
        let slot = self.slot(x, y, info.layer);
        self.cells[slot] = id;
        self.type_counts[type_id] += 1;
        id
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn status(&self) -> Status {
        self.status
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn max_steps(&self) -> Option<u64> {
        self.max_steps
    }

    pub fn set_max_steps(&mut self, limit: Option<u64>) {
        self.max_steps = limit;
    }

    pub fn globals(&self) -> &[i64] {
        &self.globals
    }

    pub fn type_count(&self, type_id: TypeId) -> u32 {
        self.type_counts.get(type_id).copied().unwrap_or(0)
    }

    pub fn live_count(&self) -> usize {
        self.type_counts.iter().map(|&c| c as usize).sum()
    }

    pub fn instance(&self, id: InstanceId) -> Option<&Instance> {
        self.instances.get(id as usize).and_then(Option::as_ref)
    }

    /// Live instances in id order.
    pub fn instances(&self) -> impl Iterator<Item = (InstanceId, &Instance)> {
        self.instances
            .iter()
            .enumerate()
            .filter_map(|(id, i)| i.as_ref().map(|i| (id as InstanceId, i)))
    }

    pub fn variables(&self, id: InstanceId, game: &Game) -> Option<&[i64]> {
        let inst = self.instance(id)?;
        let start = inst.var_start as usize;
        Some(&self.vars[start..start + game.types[inst.type_id].var_initial.len()])
    }

    /// First live instance of a type owned by `owner`.
    pub fn find(&self, type_id: TypeId, owner: u32) -> Option<InstanceId> {
        self.instances()
            .find(|(_, i)| i.type_id == type_id && i.owner == owner)
            .map(|(id, _)| id)
    }

    pub fn in_bounds(&self, x: i32, y: i32) -> bool {
        x >= 0 && y >= 0 && (x as u32) < self.width && (y as u32) < self.height
    }

    fn slot(&self, x: i32, y: i32, layer: usize) -> usize {
        (y as usize * self.width as usize + x as usize) * self.layers + layer
    }

    /// Instance ids at a cell, one per layer (lowest z first); `None` for empty layers.
    pub fn cell(&self, x: i32, y: i32) -> impl Iterator<Item = Option<InstanceId>> + '_ {
        let base = if self.in_bounds(x, y) { self.slot(x, y, 0) } else { 0 };
        let len = if self.in_bounds(x, y) { self.layers } else { 0 };
        self.cells[base..base + len]
            .iter()
            .map(|&id| (id != NONE).then_some(id))
    }

    /// Highest-z instance at a cell.
    pub fn top(&self, x: i32, y: i32) -> Option<InstanceId> {
        if !self.in_bounds(x, y) {
            return None;
        }
        let base = self.slot(x, y, 0);
        self.cells[base..base + self.layers]
            .iter()
            .rev()
            .copied()
            .find(|&id| id != NONE)
    }

    pub fn pending_reward(&self, player: u32) -> i64 {
        self.pending_rewards.get(player as usize).copied().unwrap_or(0)
    }

    pub fn clear_rewards(&mut self) {
        self.pending_rewards.iter_mut().for_each(|r| *r = 0);
    }

    /// Applies one input of an action with `source` as the acting instance.
    /// Input 0 is the no-op.
    pub fn apply_action(
        &mut self,
        game: &Game,
        source: InstanceId,
        action: ActionId,
        input: u32,
        player: u32,
    ) -> Result<ActionOutcome, EngineError> {
        if self.status.is_over() {
            return Err(EngineError::EpisodeOver);
        }
        let compiled = game.actions.get(action).ok_or(EngineError::UnknownAction(action))?;
        if input == 0 {
            return Ok(ActionOutcome {
                succeeded: true,
                ..ActionOutcome::default()
            });
        }
        let mapping = compiled
            .inputs
            .iter()
            .find(|i| i.id == input)
            .ok_or(EngineError::UnknownInput { action, input })?;
        let inst = *self.instance(source).ok_or(EngineError::NoSuchInstance(source))?;
        let (mut orientation, mut vector) = (mapping.orientation_vector, mapping.vector_to_dest.unwrap_or([0, 0]));
        if compiled.relative {
            orientation = orientation.map(|v| relative_transform(inst.orientation, v));
            vector = relative_transform(inst.orientation, vector);
        }
        let res = Resolution {
            action,
            orientation,
            vector,
            player,
        };
        let mut out = ActionOutcome::default();
        out.succeeded = self.resolve(game, res, source, 0, &mut out);
        Ok(out)
    }

    fn resolve(&mut self, game: &Game, res: Resolution, source: InstanceId, depth: u32, out: &mut ActionOutcome) -> bool {
        if depth > MAX_CASCADE_DEPTH {
            return false;
        }
        let Some(src) = self.instance(source).copied() else {
            return false;
        };
        let dest = (src.x + res.vector[0], src.y + res.vector[1]);
        if !self.in_bounds(dest.0, dest.1) {
            return false;
        }
        let target = self.top(dest.0, dest.1);
        let n = game.types.len();
        let dst_type = target.map_or(n, |id| self.instances[id as usize].unwrap().type_id);
        let index = game.actions[res.action].table[src.type_id * (n + 1) + dst_type];
        if index == NONE {
            return false;
        }
        let behaviour = &game.behaviours[index as usize];
        let frame = Frame {
            src: (src.x, src.y),
            dest,
        };
        for op in &behaviour.dst {
            if !self.exec(game, res, frame, target, op, depth, out) {
                return false;
            }
        }
        for op in &behaviour.src {
            if !self.exec(game, res, frame, Some(source), op, depth, out) {
                return false;
            }
        }
        true
    }

    #[allow(clippy::too_many_arguments)]
    fn exec(
        &mut self,
        game: &Game,
        res: Resolution,
        frame: Frame,
        actor: Option<InstanceId>,
        op: &Op,
        depth: u32,
        out: &mut ActionOutcome,
    ) -> bool {
        let live = actor.and_then(|id| self.instance(id).copied().map(|i| (id, i)));
        let at = |t: Target| match t {
            Target::Dest => frame.dest,
            Target::Src => frame.src,
        };
        match op {
            Op::Mov(t) => {
                let Some((id, inst)) = live else { return false };
                let (x, y) = at(*t);
                if (x, y) == (inst.x, inst.y) {
                    return true;
                }
                if !self.in_bounds(x, y) {
                    return false;
                }
                let layer = game.types[inst.type_id].layer;
                let to = self.slot(x, y, layer);
                if self.cells[to] != NONE {
                    return false;
                }
                let from = self.slot(inst.x, inst.y, layer);
                self.cells[from] = NONE;
                self.cells[to] = id;
                let i = self.instances[id as usize].as_mut().unwrap();
                i.x = x;
                i.y = y;
                out.mutated = true;
                true
            }
            Op::Rot => {
                let Some((id, _)) = live else { return false };
                let Some(dir) = res.orientation.and_then(Direction::from_vector) else {
                    return false;
                };
                self.instances[id as usize].as_mut().unwrap().orientation = dir;
                out.mutated = true;
                true
            }
            Op::Remove => {
                let Some((id, inst)) = live else { return false };
                let slot = self.slot(inst.x, inst.y, game.types[inst.type_id].layer);
                self.cells[slot] = NONE;
                self.instances[id as usize] = None;
                self.type_counts[inst.type_id] -= 1;
                out.mutated = true;
                out.removed += 1;
                true
            }
            Op::Spawn(type_id, t) => {
                let (x, y) = at(*t);
                if !self.in_bounds(x, y) || self.cells[self.slot(x, y, game.types[*type_id].layer)] != NONE {
                    return false;
                }
                let owner = live.map_or(0, |(_, i)| i.owner);
                self.create(game, *type_id, x, y, owner);
                out.mutated = true;
                out.spawned += 1;
                true
            }
            Op::Add(var, delta) => match self.var_mut(*var, live) {
                Some(v) => {
                    *v += delta;
                    out.mutated = true;
                    true
                }
                None => false,
            },
            Op::Set(var, value) => match self.var_mut(*var, live) {
                Some(v) => {
                    *v = *value;
                    out.mutated = true;
                    true
                }
                None => false,
            },
            Op::Reward(n) => {
                if let Some(r) = self.pending_rewards.get_mut(res.player as usize) {
                    *r += n;
                }
                out.reward += n;
                true
            }
            Op::Cascade => match self.top(frame.dest.0, frame.dest.1) {
                Some(next) => self.resolve(game, res, next, depth + 1, out),
                None => false,
            },
            Op::If { op, lhs, rhs, body } => {
                let (Some(a), Some(b)) = (self.operand(*lhs, live), self.operand(*rhs, live)) else {
                    return false;
                };
                if !op.holds(a, b) {
                    return true;
                }
                body.iter()
                    .all(|op| self.exec(game, res, frame, actor, op, depth, out))
            }
        }
    }

    fn var_mut(&mut self, var: VarRef, live: Option<(InstanceId, Instance)>) -> Option<&mut i64> {
        match var {
            VarRef::Own(slot) => live.map(|(_, i)| &mut self.vars[i.var_start as usize + slot]),
            VarRef::Global(g) => self.globals.get_mut(g),
        }
    }

    fn operand(&self, operand: Operand, live: Option<(InstanceId, Instance)>) -> Option<i64> {
        Some(match operand {
            Operand::Literal(v) => v,
            Operand::Count(t) => self.type_counts[t] as i64,
            Operand::Var(VarRef::Own(slot)) => self.vars[live?.1.var_start as usize + slot],
            Operand::Var(VarRef::Global(g)) => self.globals[g],
            Operand::Steps => self.step_count as i64,
        })
    }

    /// Evaluates Win, then Lose, then End conditions, then the step limit.
    pub fn check_termination(&self, game: &Game) -> Status {
        let first = |list: &[CompiledCondition]| {
            list.iter()
                .find(|c| match (self.operand(c.lhs, None), self.operand(c.rhs, None)) {
                    (Some(a), Some(b)) => c.op.holds(a, b),
                    _ => false,
                })
                .map(|c| c.player)
        };
        if let Some(p) = first(&game.win) {
            Status::Won(p)
        } else if let Some(p) = first(&game.lose) {
            Status::Lost(p)
        } else if first(&game.end).is_some() || self.max_steps.is_some_and(|m| self.step_count >= m) {
            Status::Ended
        } else {
            Status::Ongoing
        }
    }

    /// Closes a step: advances the step counter and updates the status.
    pub fn end_step(&mut self, game: &Game) -> Result<Status, EngineError> {
        if self.status.is_over() {
            return Err(EngineError::EpisodeOver);
        }
        self.step_count += 1;
        self.status = self.check_termination(game);
        Ok(self.status)
    }

    /// Hash of the observable state. Instance ids and pending rewards are excluded.
    pub fn digest(&self, game: &Game) -> u64 {
        let mut h = Fnv1a::default();
        h.u32(self.width);
        h.u32(self.height);
        h.u64(self.live_count() as u64);
        for (_, inst) in self.instances() {
            let info = &game.types[inst.type_id];
            h.u32(inst.type_id as u32);
            h.i32(inst.x);
            h.i32(inst.y);
            h.u32(info.z);
            h.u8(inst.orientation as u8);
            h.u32(inst.owner);
            let start = inst.var_start as usize;
            for &v in &self.vars[start..start + info.var_initial.len()] {
                h.i64(v);
            }
        }
        for &g in &self.globals {
            h.i64(g);
        }
        h.u64(self.step_count);
        let (tag, player) = match self.status {
            Status::Ongoing => (0, 0),
            Status::Won(p) => (1, p),
            Status::Lost(p) => (2, p),
            Status::Ended => (3, 0),
        };
        h.u8(tag);
        h.u32(player);
        h.finish()
    }

    /// Checks that cells, instances and counts agree.
    pub fn verify(&self, game: &Game) -> Result<(), InvariantViolation> {
        let mut counts = alloc::vec![0u32; game.types.len()];
        for (id, inst) in self.instances() {
            if !self.in_bounds(inst.x, inst.y) {
                return Err(InvariantViolation::OutOfBounds {
                    id,
                    x: inst.x,
                    y: inst.y,
                });
            }
            if self.cells[self.slot(inst.x, inst.y, game.types[inst.type_id].layer)] != id {
                return Err(InvariantViolation::Unplaced { id });
            }
            counts[inst.type_id] += 1;
        }
        for (slot, &id) in self.cells.iter().enumerate() {
            if id == NONE {
                continue;
            }
            let ok = self.instance(id).is_some_and(|i| {
                self.in_bounds(i.x, i.y) && self.slot(i.x, i.y, game.types[i.type_id].layer) == slot
            });
            if !ok {
                return Err(InvariantViolation::StaleCell { slot, id });
            }
        }
        for (type_id, (&recorded, &actual)) in self.type_counts.iter().zip(&counts).enumerate() {
            if recorded != actual {
                return Err(InvariantViolation::Count {
                    type_id,
                    recorded,
                    actual,
                });
            }
        }
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn set_orientation(&mut self, id: InstanceId, dir: Direction) {
        self.instances[id as usize].as_mut().unwrap().orientation = dir;
    }
}
