use alloc::string::ToString;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::gdy::parse_gdy;

const SOKOBAN: &str = include_str!("../../../../games/sokoban.gdy");

/// Absolute movement, no avatar: units are addressed by coordinate.
const UNITS: &str = "\
Environment:
  Name: units
  Player:
    Count: 2
  Levels:
    - |
      u1 . u2
      .  . .
Objects:
  - Name: unit
    MapCharacter: u
Actions:
  - Name: move
    InputMapping:
      Inputs:
        1:
          Description: Move up
          VectorToDest: [0, -1]
        2:
          Description: Move left
          VectorToDest: [-1, 0]
        3:
          Description: Move down
          VectorToDest: [0, 1]
        4:
          Description: Move right
          VectorToDest: [1, 0]
    Behaviours:
      - Src:
          Object: unit
          Commands:
            - mov: _dest
            - reward: 2
        Dst:
          Object: _empty
";

fn game(src: &str) -> Arc<Game> {
    Arc::new(Game::new(parse_gdy(src).unwrap()).unwrap())
}

fn sokoban_env() -> Environment {
    Environment::new(game(SOKOBAN), EnvOptions::default(), ObserverKind::Vector).unwrap()
}

const FORWARD: PlayerAction = PlayerAction::Avatar { action: 0, input: 2 };

#[test]
fn reset_observation_shape() {
    let mut env = sokoban_env();
    let obs = env.reset(None).unwrap();
    assert_eq!(obs.len(), 1);
    assert_eq!(obs[0].as_vector().unwrap().shape(), (4, 7, 7));
    let first = env.digest();
    env.reset(None).unwrap();
    assert_eq!(env.digest(), first);
}

#[test]
fn reset_to_second_level() {
    let mut env = sokoban_env();
    env.set_observer_config(1, ObserverConfig::global()).unwrap();
    let obs = env.reset(Some(1)).unwrap();
    assert_eq!(obs[0].as_vector().unwrap().shape(), (4, 8, 9));
    let global = env.global_observe(ObserverKind::Vector);
    assert_eq!(global.as_vector().unwrap().shape(), (4, 8, 9));
    assert!(matches!(
        env.reset(Some(7)),
        Err(EnvError::Engine(EngineError::LevelOutOfRange { index: 7, count: 2 }))
    ));
}

#[test]
fn noop_step_only_advances_the_clock() {
    let mut env = sokoban_env();
    let mut expected = env.state().clone();
    expected.end_step(env.game()).unwrap();
    let result = env.step(&[PlayerAction::NoOp]).unwrap();
    assert_eq!(result.rewards, vec![0]);
    assert!(!result.terminated);
    assert_eq!(result.info.step_count, 1);
    assert_eq!(env.digest(), expected.digest(env.game()));
}

#[test]
fn action_spaces() {
    let env = sokoban_env();
    let space: Vec<_> = env
        .action_space(1)
        .into_iter()
        .map(|e| (e.action, e.input, e.description))
        .collect();
    assert_eq!(
        space,
        vec![
            (None, 0, "Do nothing".into()),
            (Some(0), 1, "Rotate left".into()),
            (Some(0), 2, "Move forwards".into()),
            (Some(0), 3, "Rotate right".into()),
        ]
    );

    let units = Environment::new(game(UNITS), EnvOptions::default(), ObserverKind::Ascii).unwrap();
    let inputs: Vec<_> = units.action_space(1).iter().map(|e| e.input).collect();
    assert_eq!(inputs, vec![0, 1, 2, 3, 4]);

    let bare = "Environment:\n  Name: bare\n  Levels:\n    - |\n      x\nObjects:\n  - Name: x\n    MapCharacter: x\n";
    let bare = Environment::new(game(bare), EnvOptions::default(), ObserverKind::Vector).unwrap();
    assert_eq!(bare.action_space(1).len(), 1);
}

#[test]
fn step_after_end_errors_and_reset_recovers() {
    let options = EnvOptions {
        max_steps: 3,
        ..EnvOptions::default()
    };
    let mut env = Environment::new(game(SOKOBAN), options, ObserverKind::Vector).unwrap();
    for _ in 0..2 {
        assert!(!env.step(&[PlayerAction::NoOp]).unwrap().terminated);
    }
    let last = env.step(&[PlayerAction::NoOp]).unwrap();
    assert!(last.terminated);
    assert_eq!(last.info.status, Status::Ended);
    assert_eq!(last.winner, None);
    assert_eq!(
        env.step(&[PlayerAction::NoOp]),
        Err(EnvError::Engine(EngineError::EpisodeOver))
    );
    env.reset(None).unwrap();
    assert!(env.step(&[FORWARD]).is_ok());
}

#[test]
fn action_form_and_count_are_checked() {
    let mut env = sokoban_env();
    assert_eq!(
        env.step(&[]),
        Err(EnvError::ActionCount { expected: 1, actual: 0 })
    );
    let coord = PlayerAction::Coord {
        x: 4,
        y: 1,
        action: 0,
        input: 2,
    };
    assert!(matches!(env.step(&[coord]), Err(EnvError::WrongActionForm { player: 1, .. })));

    let mut units = Environment::new(game(UNITS), EnvOptions::default(), ObserverKind::Ascii).unwrap();
    assert!(matches!(
        units.step(&[FORWARD, PlayerAction::NoOp]),
        Err(EnvError::WrongActionForm { player: 1, .. })
    ));
}

#[test]
fn coordinate_actions_route_to_owned_units() {
    let mut env = Environment::new(game(UNITS), EnvOptions::default(), ObserverKind::Ascii).unwrap();
    let down = |x| PlayerAction::Coord { x, y: 0, action: 0, input: 3 };
    // Player 1 addresses player 2's unit: soft failure.
    let result = env.step(&[down(2), down(2)]).unwrap();
    assert_eq!(result.info.rejected, vec![1]);
    assert_eq!(result.rewards, vec![0, 2]);
    let board = result.observations[0].as_ascii().unwrap().to_string();
    assert_eq!(board, "u..\n..u\n");
    let result = env.step(&[down(0), PlayerAction::NoOp]).unwrap();
    assert!(result.info.rejected.is_empty());
    assert_eq!(result.rewards, vec![2, 0]);
    assert_eq!(env.episode_rewards(), &[2, 2]);
}

#[test]
fn sampling_is_seeded_per_episode() {
    let rollout = |seed| {
        let options = EnvOptions {
            seed,
            ..EnvOptions::default()
        };
        let mut env = Environment::new(game(SOKOBAN), options, ObserverKind::Vector).unwrap();
        let mut digests = Vec::new();
        for _ in 0..200 {
            let a = env.sample_action(1);
            env.step(&[a]).unwrap();
            digests.push(env.digest());
        }
        digests
    };
    assert_eq!(rollout(9), rollout(9));
    assert_ne!(rollout(9), rollout(10));
}

#[test]
fn step_into_reuses_buffers() {
    let mut env = Environment::new(game(SOKOBAN), EnvOptions::default(), ObserverKind::Block).unwrap();
    let mut out = StepResult::default();
    env.step_into(&[FORWARD], &mut out).unwrap();
    let ptr = out.observations[0].as_block().unwrap().data.as_ptr();
    env.step_into(&[PlayerAction::Avatar { action: 0, input: 1 }], &mut out).unwrap();
    assert_eq!(out.observations[0].as_block().unwrap().data.as_ptr(), ptr);
    let (w, h) = (7 * 24, 7 * 24);
    let block = out.observations[0].as_block().unwrap();
    assert_eq!((block.width, block.height), (w, h));
}

#[test]
fn global_observers_do_not_disturb_state() {
    let mut env = sokoban_env();
    env.step(&[FORWARD]).unwrap();
    let digest = env.digest();
    let ascii = env.global_observe(ObserverKind::Ascii);
    let vector = env.global_observe(ObserverKind::Vector);
    let _ = env.global_observe(ObserverKind::Block);
    assert_eq!(env.digest(), digest);
    let vector = vector.as_vector().unwrap();
    for (c, _) in env.game().types().iter().enumerate() {
        assert_eq!(vector.channel_sum(c as u32), env.state().type_count(c) as i64);
    }
    let rows = ascii.as_ascii().unwrap().to_string();
    assert_eq!(rows.lines().count(), 7);
}
