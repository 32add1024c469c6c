//! Episode orchestration: reset, step, per-player action routing and observations.

#[cfg(test)]
mod tests;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::engine::{ActionId, EngineError, Game, GridState, InstanceId, Status};
use crate::gdy::ObserverConfig;
use crate::observers::{
    observe_ascii, observe_vector_into, window_transform, AsciiObservation, BlockRenderer, ObserveError,
    PixelObservation, VectorObservation, Window,
};

pub const DEFAULT_MAX_STEPS: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvOptions {
    /// Steps before the episode ends; 0 disables the limit.
    pub max_steps: u64,
    pub level: usize,
    pub seed: u64,
}

impl Default for EnvOptions {
    fn default() -> Self {
        EnvOptions {
            max_steps: DEFAULT_MAX_STEPS,
            level: 0,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObserverKind {
    Vector,
    Ascii,
    Block,
}

impl ObserverKind {
    pub const ALL: [ObserverKind; 3] = [ObserverKind::Vector, ObserverKind::Ascii, ObserverKind::Block];

    pub fn name(self) -> &'static str {
        match self {
            ObserverKind::Vector => "vector",
            ObserverKind::Ascii => "ascii",
            ObserverKind::Block => "block",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Observation {
    Vector(VectorObservation),
    Ascii(AsciiObservation),
    Block(PixelObservation),
}

impl Observation {
    fn empty(kind: ObserverKind) -> Self {
        match kind {
            ObserverKind::Vector => Observation::Vector(VectorObservation::default()),
            ObserverKind::Ascii => Observation::Ascii(AsciiObservation {
                width: 0,
                height: 0,
                cells: Vec::new(),
            }),
            ObserverKind::Block => Observation::Block(PixelObservation::default()),
        }
    }

    pub fn kind(&self) -> ObserverKind {
        match self {
            Observation::Vector(_) => ObserverKind::Vector,
            Observation::Ascii(_) => ObserverKind::Ascii,
            Observation::Block(_) => ObserverKind::Block,
        }
    }

    pub fn as_vector(&self) -> Option<&VectorObservation> {
        match self {
            Observation::Vector(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_ascii(&self) -> Option<&AsciiObservation> {
        match self {
            Observation::Ascii(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_block(&self) -> Option<&PixelObservation> {
        match self {
            Observation::Block(v) => Some(v),
            _ => None,
        }
    }
}

/// One player's move for a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PlayerAction {
    #[default]
    NoOp,
    /// Performed by the player's avatar.
    Avatar { action: ActionId, input: u32 },
    /// Performed by the player's object at `(x, y)`; for games without avatars.
    Coord { x: i32, y: i32, action: ActionId, input: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionSpaceEntry {
    /// `None` for the no-op.
    pub action: Option<ActionId>,
    pub name: String,
    pub input: u32,
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepInfo {
    pub step_count: u64,
    pub status: Status,
    /// Players whose action was turned into a failed no-op (no avatar, or no
    /// owned object at the addressed cell).
    pub rejected: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StepResult {
    /// Indexed by player id minus one.
    pub observations: Vec<Observation>,
    /// Indexed by player id minus one.
    pub rewards: Vec<i64>,
    pub terminated: bool,
    pub winner: Option<u32>,
    pub info: StepInfo,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EnvError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Observe(#[from] ObserveError),
    #[error("expected one action per player ({expected}), got {actual}")]
    ActionCount { expected: usize, actual: usize },
    #[error("player {player}: this game takes {expected} actions")]
    WrongActionForm { player: u32, expected: &'static str },
    #[error("player {0} does not exist")]
    NoSuchPlayer(u32),
}

/// A game episode driven one step at a time.
#[derive(Debug, Clone)]
pub struct Environment {
    game: Arc<Game>,
    state: GridState,
    options: EnvOptions,
    kind: ObserverKind,
    observers: Vec<ObserverConfig>,
    renderer: BlockRenderer,
    rng: ChaCha8Rng,
    episodes: u64,
    avatars: Vec<Option<InstanceId>>,
    episode_rewards: Vec<i64>,
}

impl Environment {
    pub fn new(game: Arc<Game>, options: EnvOptions, kind: ObserverKind) -> Result<Self, EnvError> {
        let mut state = GridState::new(&game, options.level)?;
        state.set_max_steps((options.max_steps > 0).then_some(options.max_steps));
        let players = game.player_count() as usize;
        let mut env = Environment {
            renderer: BlockRenderer::new(&game),
            observers: alloc::vec![game.description().player.observer; players],
            rng: ChaCha8Rng::seed_from_u64(options.seed),
            avatars: alloc::vec![None; players],
            episode_rewards: alloc::vec![0; players],
            episodes: 0,
            game,
            state,
            options,
            kind,
        };
        env.start_episode();
        Ok(env)
    }

    fn start_episode(&mut self) {
        self.rng = ChaCha8Rng::seed_from_u64(self.options.seed);
        self.rng.set_stream(self.episodes);
        self.episodes += 1;
        for (i, slot) in self.avatars.iter_mut().enumerate() {
            *slot = self.game.avatar_type().and_then(|t| self.state.find(t, i as u32 + 1));
        }
        self.episode_rewards.iter_mut().for_each(|r| *r = 0);
    }

    pub fn game(&self) -> &Arc<Game> {
        &self.game
    }

    pub fn state(&self) -> &GridState {
        &self.state
    }

    pub fn options(&self) -> EnvOptions {
        self.options
    }

    pub fn observer_kind(&self) -> ObserverKind {
        self.kind
    }

    pub fn player_count(&self) -> u32 {
        self.game.player_count()
    }

    pub fn digest(&self) -> u64 {
        self.state.digest(&self.game)
    }

    /// Rewards accumulated since the last reset, indexed by player id minus one.
    pub fn episode_rewards(&self) -> &[i64] {
        &self.episode_rewards
    }

    pub fn observer_config(&self, player: u32) -> Option<&ObserverConfig> {
        self.observers.get((player as usize).wrapping_sub(1))
    }

    pub fn set_observer_config(&mut self, player: u32, config: ObserverConfig) -> Result<(), EnvError> {
        let slot = self
            .observers
            .get_mut((player as usize).wrapping_sub(1))
            .ok_or(EnvError::NoSuchPlayer(player))?;
        *slot = config;
        Ok(())
    }

    /// Starts a new episode on `level`, or the configured level.
    pub fn reset(&mut self, level: Option<usize>) -> Result<Vec<Observation>, EnvError> {
        self.restart(level)?;
        (1..=self.player_count()).map(|p| self.observe(p)).collect()
    }

    /// As [`reset`](Self::reset) without producing observations; reuses all buffers.
    pub fn restart(&mut self, level: Option<usize>) -> Result<(), EnvError> {
        self.state.reset(&self.game, level.unwrap_or(self.options.level))?;
        self.start_episode();
        Ok(())
    }

    pub fn step(&mut self, actions: &[PlayerAction]) -> Result<StepResult, EnvError> {
        let mut result = StepResult::default();
        self.step_into(actions, &mut result)?;
        Ok(result)
    }

    /// As [`step`](Self::step), reusing the buffers in `out`.
    pub fn step_into(&mut self, actions: &[PlayerAction], out: &mut StepResult) -> Result<(), EnvError> {
        let players = self.player_count() as usize;
        if actions.len() != players {
            return Err(EnvError::ActionCount {
                expected: players,
                actual: actions.len(),
            });
        }
        if self.state.status().is_over() {
            return Err(EngineError::EpisodeOver.into());
        }
        let has_avatar = self.game.avatar_type().is_some();
        for (i, action) in actions.iter().enumerate() {
            let valid = match action {
                PlayerAction::NoOp => true,
                PlayerAction::Avatar { .. } => has_avatar,
                PlayerAction::Coord { .. } => !has_avatar,
            };
            if !valid {
                return Err(EnvError::WrongActionForm {
                    player: i as u32 + 1,
                    expected: if has_avatar { "avatar" } else { "coordinate" },
                });
            }
        }

        out.info.rejected.clear();
        for (i, action) in actions.iter().enumerate() {
            let player = i as u32 + 1;
            let (source, action, input) = match *action {
                PlayerAction::NoOp => continue,
                PlayerAction::Avatar { action, input } => {
                    let live = self.avatars[i].filter(|&id| self.state.instance(id).is_some());
                    (live, action, input)
                }
                PlayerAction::Coord { x, y, action, input } => {
                    let owned = self
                        .state
                        .cell(x, y)
                        .flatten()
                        .filter(|&id| self.state.instance(id).is_some_and(|inst| inst.owner == player))
                        .last();
                    (owned, action, input)
                }
            };
            match source {
                Some(id) => {
                    self.state.apply_action(&self.game, id, action, input, player)?;
                }
                None => out.info.rejected.push(player),
            }
        }

        out.rewards.resize(players, 0);
        for (p, reward) in out.rewards.iter_mut().enumerate() {
            *reward = self.state.pending_reward(p as u32 + 1);
            self.episode_rewards[p] += *reward;
        }
        self.state.clear_rewards();
        let status = self.state.end_step(&self.game)?;

        out.terminated = status.is_over();
        out.winner = match status {
            Status::Won(p) => Some(p),
            _ => None,
        };
        out.info.step_count = self.state.step_count();
        out.info.status = status;
        if out.observations.len() != players || out.observations.iter().any(|o| o.kind() != self.kind) {
            out.observations.clear();
            out.observations.resize(players, Observation::empty(self.kind));
        }
        for (p, obs) in out.observations.iter_mut().enumerate() {
            Self::observe_player(
                &self.game,
                &self.state,
                &self.renderer,
                &self.observers[p],
                self.avatars[p],
                p as u32 + 1,
                obs,
            )?;
        }
        Ok(())
    }

    /// Current observation for `player` with this environment's observer kind.
    pub fn observe(&self, player: u32) -> Result<Observation, EnvError> {
        let config = self.observer_config(player).ok_or(EnvError::NoSuchPlayer(player))?;
        let mut obs = Observation::empty(self.kind);
        let avatar = self.avatars[player as usize - 1];
        Self::observe_player(&self.game, &self.state, &self.renderer, config, avatar, player, &mut obs)?;
        Ok(obs)
    }

    fn observe_player(
        game: &Game,
        state: &GridState,
        renderer: &BlockRenderer,
        config: &ObserverConfig,
        avatar: Option<InstanceId>,
        player: u32,
        out: &mut Observation,
    ) -> Result<(), EnvError> {
        let window = if config.track_avatar {
            let inst = avatar.and_then(|id| state.instance(id));
            Window::new(state, config, inst).ok_or(ObserveError::AvatarDead(player))?
        } else {
            window_transform(game, state, config, player)?
        };
        Self::render(game, state, renderer, &window, out);
        Ok(())
    }

    fn render(game: &Game, state: &GridState, renderer: &BlockRenderer, window: &Window, out: &mut Observation) {
        match out {
            Observation::Vector(v) => observe_vector_into(game, state, window, v),
            Observation::Ascii(a) => *a = observe_ascii(game, state, window),
            Observation::Block(b) => renderer.render_into(state, window, b),
        }
    }

    /// Untracked full-grid view, independent of the player observers.
    pub fn global_observe(&self, kind: ObserverKind) -> Observation {
        let mut obs = Observation::empty(kind);
        self.global_observe_into(&mut obs);
        obs
    }

    /// Fills `out` with the global view, keeping its kind.
    pub fn global_observe_into(&self, out: &mut Observation) {
        Self::render(&self.game, &self.state, &self.renderer, &Window::global(&self.state), out);
    }

    /// The no-op followed by every input of every action, in definition order.
    pub fn action_space(&self, _player: u32) -> Vec<ActionSpaceEntry> {
        let mut space = alloc::vec![ActionSpaceEntry {
            action: None,
            name: String::from("noop"),
            input: 0,
            description: String::from("Do nothing"),
        }];
        for (id, action) in self.game.description().actions.iter().enumerate() {
            let mut inputs: Vec<_> = action.inputs.iter().collect();
            inputs.sort_by_key(|i| i.id);
            for input in inputs {
                space.push(ActionSpaceEntry {
                    action: Some(id),
                    name: action.name.clone(),
                    input: input.id,
                    description: input.description.clone(),
                });
            }
        }
        space
    }

    /// Uniform draw from the action space using the episode RNG.
    pub fn sample_action(&mut self, player: u32) -> PlayerAction {
        let total: usize = 1 + (0..self.game.action_count()).map(|a| self.game.inputs(a).len()).sum::<usize>();
        let mut pick = self.rng.random_range(0..total);
        if pick == 0 {
            return PlayerAction::NoOp;
        }
        pick -= 1;
        let (mut action, mut input) = (0, 0);
        for a in 0..self.game.action_count() {
            let inputs = self.game.inputs(a);
            if pick < inputs.len() {
                action = a;
                input = inputs[pick].id;
                break;
            }
            pick -= inputs.len();
        }
        if self.game.avatar_type().is_some() {
            return PlayerAction::Avatar { action, input };
        }
        let owned = self.state.instances().filter(|(_, i)| i.owner == player).count();
        if owned == 0 {
            return PlayerAction::NoOp;
        }
        let n = self.rng.random_range(0..owned);
        let (_, inst) = self
            .state
            .instances()
            .filter(|(_, i)| i.owner == player)
            .nth(n)
            .unwrap();
        PlayerAction::Coord {
            x: inst.x,
            y: inst.y,
            action,
            input,
        }
    }
}
