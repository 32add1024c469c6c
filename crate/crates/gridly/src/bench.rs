//! Observer throughput benchmark.

use std::fmt;
use std::fs;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use gridly_core::engine::Game;
use gridly_core::env::{EnvOptions, Environment, ObserverKind, PlayerAction, StepResult};

use crate::vecenv::VecEnv;
use crate::Error;

pub const MIN_FRAMES: u64 = 10_000;
pub const TRIALS: usize = 5;
pub const CSV_HEADER: &str = "game,observer,fps_mean,fps_std,mem_mb";

const SAMPLE_PERIOD: Duration = Duration::from_millis(100);

/// Steps per second for `frames` random steps, including observation
/// production and episode restarts.
pub fn measure(env: &mut Environment, frames: u64) -> Result<f64, Error> {
    let mut actions = vec![PlayerAction::NoOp; env.player_count() as usize];
    let mut out = StepResult::default();
    let start = Instant::now();
    for _ in 0..frames {
        for (p, a) in actions.iter_mut().enumerate() {
            *a = env.sample_action(p as u32 + 1);
        }
        env.step_into(&actions, &mut out)?;
        if out.terminated {
            env.restart(None)?;
        }
    }
    Ok(frames as f64 / start.elapsed().as_secs_f64())
}

/// Current resident set size in MB, from `/proc/self/status`.
pub fn resident_mb() -> Option<f64> {
    let status = fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmRSS:"))?;
    let kb: f64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb / 1024.0)
}

/// Samples resident memory on a background thread and keeps the maximum.
struct PeakSampler {
    stop: Arc<AtomicBool>,
    handle: thread::JoinHandle<f64>,
}

impl PeakSampler {
    fn start() -> Self {
        let stop = Arc::new(AtomicBool::new(false));
        let flag = Arc::clone(&stop);
        let handle = thread::spawn(move || {
            let mut peak = resident_mb().unwrap_or(0.0);
            while !flag.load(Ordering::Relaxed) {
                thread::sleep(SAMPLE_PERIOD);
                peak = peak.max(resident_mb().unwrap_or(0.0));
            }
            peak
        });
        PeakSampler { stop, handle }
    }

    fn finish(self) -> f64 {
        self.stop.store(true, Ordering::Relaxed);
        let peak = self.handle.join().unwrap_or(0.0);
        peak.max(resident_mb().unwrap_or(0.0))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub game: String,
    pub observer: ObserverKind,
    /// Environments stepped concurrently; 1 for the single-threaded run.
    pub parallel: usize,
    pub fps_mean: f64,
    pub fps_std: f64,
    pub mem_mb: f64,
}

impl BenchRow {
    fn observer_label(&self) -> String {
        match self.parallel {
            1 => self.observer.name().to_string(),
            n => format!("{}[parallel={n}]", self.observer.name()),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn csv(&self) -> String {
        let mut text = format!("{CSV_HEADER}\n");
        for row in &self.rows {
            text += &format!(
                "{},{},{:.1},{:.1},{:.1}\n",
                row.game,
                row.observer_label(),
                row.fps_mean,
                row.fps_std,
                row.mem_mb
            );
        }
        text
    }
}

impl fmt::Display for BenchReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<16} {:<22} {:>14} {:>12} {:>10}",
            "game", "observer", "fps mean", "fps std", "mem MB"
        )?;
        for row in &self.rows {
            writeln!(
                f,
                "{:<16} {:<22} {:>14.1} {:>12.1} {:>10.1}",
                row.game,
                row.observer_label(),
                row.fps_mean,
                row.fps_std,
                row.mem_mb
            )?;
        }
        if self.rows.iter().any(|r| r.parallel > 1) {
            writeln!(f, "parallel rows report aggregate throughput across environments")?;
        }
        Ok(())
    }
}

fn mean_std(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub name: String,
    pub game: Arc<Game>,
    pub level: usize,
    pub frames: u64,
    pub seed: u64,
    pub observers: Vec<ObserverKind>,
    pub parallel: usize,
}

/// One row per observer, each from [`TRIALS`] timed trials after a warmup.
pub fn run(spec: &BenchSpec) -> Result<BenchReport, Error> {
    if spec.frames < MIN_FRAMES {
        return Err(Error::Config(format!(
            "frames must be at least {MIN_FRAMES}, got {}",
            spec.frames
        )));
    }
    let options = EnvOptions {
        level: spec.level,
        seed: spec.seed,
        ..EnvOptions::default()
    };
    let mut report = BenchReport::default();
    for &observer in &spec.observers {
        let sampler = PeakSampler::start();
        let mut fps = Vec::with_capacity(TRIALS);
        if spec.parallel <= 1 {
            let mut env = Environment::new(Arc::clone(&spec.game), options, observer)?;
            measure(&mut env, MIN_FRAMES / 10)?;
            for _ in 0..TRIALS {
                env.restart(None)?;
                fps.push(measure(&mut env, spec.frames)?);
            }
        } else {
            let envs = (0..spec.parallel)
                .map(|i| {
                    let options = EnvOptions {
                        seed: spec.seed.wrapping_add(i as u64),
                        ..options
                    };
                    Environment::new(Arc::clone(&spec.game), options, observer)
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut vec = VecEnv::new(envs).with_workers(spec.parallel);
            vec.run_random(MIN_FRAMES / 10)?;
            for _ in 0..TRIALS {
                let start = Instant::now();
                let steps = vec.run_random(spec.frames)?;
                fps.push(steps as f64 / start.elapsed().as_secs_f64());
            }
        }
        let mem_mb = sampler.finish();
        let (fps_mean, fps_std) = mean_std(&fps);
        report.rows.push(BenchRow {
            game: spec.name.clone(),
            observer,
            parallel: spec.parallel.max(1),
            fps_mean,
            fps_std,
            mem_mb,
        });
    }
    Ok(report)
}
