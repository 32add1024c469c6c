//! Random-agent rollouts.

use std::fmt;

use gridly_core::env::{Environment, StepResult};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunSummary {
    pub steps: u64,
    /// Episodes that reached a terminal status.
    pub episodes: u64,
    pub total_reward: i64,
    pub final_digest: u64,
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "steps={} episodes={} total_reward={} digest={:016x}",
            self.steps, self.episodes, self.total_reward, self.final_digest
        )
    }
}

/// Steps `env` with uniformly sampled actions, resetting after each terminal
/// step. With `check`, cell/instance consistency is verified after every step.
pub fn run_random(env: &mut Environment, steps: u64, check: bool) -> Result<RunSummary, Error> {
    let players = env.player_count() as usize;
    let mut actions = vec![Default::default(); players];
    let mut out = StepResult::default();
    let mut summary = RunSummary {
        steps: 0,
        episodes: 0,
        total_reward: 0,
        final_digest: env.digest(),
    };
    for step in 0..steps {
        for (p, a) in actions.iter_mut().enumerate() {
            *a = env.sample_action(p as u32 + 1);
        }
        env.step_into(&actions, &mut out)?;
        summary.total_reward += out.rewards.iter().sum::<i64>();
        if check {
            env.state()
                .verify(env.game())
                .map_err(|violation| Error::Invariant { step, violation })?;
        }
        if out.terminated {
            summary.episodes += 1;
            env.restart(None)?;
        }
        summary.steps += 1;
    }
    summary.final_digest = env.digest();
    Ok(summary)
}
