//! Independent environments stepped in parallel.

use std::num::NonZeroUsize;
use std::thread;

use gridly_core::env::{Environment, PlayerAction, StepResult};

use crate::Error;

/// Owns N environments; each step runs them on worker threads. Environments
/// share no mutable state, so results match stepping them one by one.
#[derive(Debug)]
pub struct VecEnv {
    envs: Vec<Environment>,
    results: Vec<StepResult>,
    workers: usize,
}

impl VecEnv {
    pub fn new(envs: Vec<Environment>) -> Self {
        let workers = thread::available_parallelism().map_or(1, NonZeroUsize::get);
        VecEnv {
            results: vec![StepResult::default(); envs.len()],
            envs,
            workers,
        }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn envs(&self) -> &[Environment] {
        &self.envs
    }

    pub fn len(&self) -> usize {
        self.envs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.envs.is_empty()
    }

    /// Steps environment `i` with `actions[i]`. Terminated environments are
    /// restarted after their result is recorded.
    pub fn step(&mut self, actions: &[Vec<PlayerAction>]) -> Result<&[StepResult], Error> {
        assert_eq!(actions.len(), self.envs.len(), "one action list per environment");
        let chunk = self.envs.len().div_ceil(self.workers).max(1);
        thread::scope(|scope| {
            let handles: Vec<_> = self
                .envs
                .chunks_mut(chunk)
                .zip(self.results.chunks_mut(chunk))
                .zip(actions.chunks(chunk))
                .map(|((envs, results), actions)| {
                    scope.spawn(move || -> Result<(), Error> {
                        for ((env, out), a) in envs.iter_mut().zip(results).zip(actions) {
                            env.step_into(a, out)?;
                            if out.terminated {
                                env.restart(None)?;
                            }
                        }
                        Ok(())
                    })
                })
                .collect();
            handles
                .into_iter()
                .try_for_each(|h| h.join().expect("worker panicked"))
        })?;
        Ok(&self.results)
    }

    /// Runs `steps` random steps in every environment; returns the total
    /// number of steps taken.
    pub fn run_random(&mut self, steps: u64) -> Result<u64, Error> {
        let chunk = self.envs.len().div_ceil(self.workers).max(1);
        thread::scope(|scope| {
            let handles: Vec<_> = self
                .envs
                .chunks_mut(chunk)
                .map(|envs| {
                    scope.spawn(move || -> Result<u64, Error> {
                        let mut total = 0;
                        for env in envs {
                            total += crate::rollout::run_random(env, steps, false)?.steps;
                        }
                        Ok(total)
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("worker panicked"))
                .sum()
        })
    }
}
