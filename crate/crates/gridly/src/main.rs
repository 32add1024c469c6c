use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gridly::bench::{self, BenchSpec};
use gridly::config::RunConfig;
use gridly::core::env::{Environment, ObserverKind};
use gridly::pack::resolve_game;
use gridly::solver::{self, Script};
use gridly::{load_unchecked, record, rollout, Error};

const EXIT_INVALID: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "gridly", version, about = "Grid-world games described in GDY")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check a GDY file; diagnostics go to stderr.
    Validate { path: PathBuf },
    /// Roll out a uniformly random agent and print a summary line.
    RunRandom {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1000)]
        steps: u64,
        /// Verify grid consistency after every step.
        #[arg(long)]
        check: bool,
    },
    /// Measure steps per second for each observer.
    Bench {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 100_000)]
        frames: u64,
        /// Observers to measure, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "vector,block")]
        observers: Vec<String>,
        /// Step N independent environments on worker threads.
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        /// Also write the report as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write global block renders of a random rollout as PNG frames.
    Record {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 20)]
        steps: u64,
        #[arg(long, default_value = "frames")]
        out: PathBuf,
    },
    /// Find a shortest winning input sequence by breadth-first search.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        /// Maximum number of distinct states to explore.
        #[arg(long, default_value_t = 2_000_000)]
        limit: usize,
        /// Write the script here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct RunArgs {
    /// GDY file or pack game name.
    #[arg(long)]
    game: Option<String>,
    #[arg(long)]
    level: Option<usize>,
    /// Steps before an episode ends; 0 for unlimited.
    #[arg(long)]
    max_steps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// vector, ascii or block.
    #[arg(long)]
    observer: Option<String>,
    /// TOML file with the same keys; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig, Error> {
        let file = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let merged = file.merge(RunConfig {
            game: self.game.clone(),
            level: self.level,
            max_steps: self.max_steps,
            seed: self.seed,
            observer: self.observer.clone(),
        });
        if merged.game.is_none() {
            return Err(Error::Config("no game given (--game or config file)".into()));
        }
        Ok(merged)
    }

    fn environment(&self) -> Result<(String, Environment), Error> {
        let config = self.resolve()?;
        let (name, game) = resolve_game(config.game.as_deref().unwrap_or_default())?;
        let env = Environment::new(game, config.options(), config.observer_kind()?)?;
        Ok((name, env))
    }
}

fn validate(path: &Path) -> ExitCode {
    let parsed = match load_unchecked(path) {
        Ok(parsed) => parsed,
        Err(Error::Gdy { source, .. }) => {
            eprintln!("{}: {source}", path.display());
            return ExitCode::from(EXIT_INVALID);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let report = parsed.validate();
    for d in parsed.warnings.iter().chain(&report.diagnostics) {
        eprintln!("{}: {d}", path.display());
    }
    if report.has_errors() {
        ExitCode::from(EXIT_INVALID)
    } else {
        println!("{}: ok", path.display());
        ExitCode::SUCCESS
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Validate { .. } => unreachable!("handled separately"),
        Command::RunRandom { run, steps, check } => {
            let (_, mut env) = run.environment()?;
            println!("{}", rollout::run_random(&mut env, steps, check)?);
        }
        Command::Bench {
            run,
            frames,
            observers,
            parallel,
            csv,
        } => {
            let config = run.resolve()?;
            let (name, game) = resolve_game(config.game.as_deref().unwrap_or_default())?;
            let observers = observers
                .iter()
                .map(|o| {
                    ObserverKind::from_name(o.trim())
                        .ok_or_else(|| Error::Config(format!("unknown observer '{o}'")))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let options = config.options();
            let report = bench::run(&BenchSpec {
                name,
                game,
                level: options.level,
                frames,
                seed: options.seed,
                observers,
                parallel,
            })?;
            print!("{report}");
            if let Some(path) = csv {
                std::fs::write(&path, report.csv()).map_err(|source| Error::Io { path, source })?;
            }
        }
        Command::Record { run, steps, out } => {
            let (_, mut env) = run.environment()?;
            let frames = record::record(&mut env, steps, &out)?;
            println!("wrote {} frames to {}", frames.len(), out.display());
        }
        Command::Solve { run, limit, out } => {
            let config = run.resolve()?;
            let (_, game) = resolve_game(config.game.as_deref().unwrap_or_default())?;
            let level = config.options().level;
            let Some(solution) = solver::solve(&game, level, limit)? else {
                return Err(Error::Config(format!(
                    "no win found on level {level} within {limit} states"
                )));
            };
            let script = Script::from_moves(&game, &solution.moves);
            eprintln!(
                "solved level {level} in {} moves ({} states explored)",
                script.len(),
                solution.explored
            );
            match out {
                Some(path) => std::fs::write(&path, script.to_string())
                    .map_err(|source| Error::Io { path, source })?,
                None => print!("{script}"),
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::Validate { path } = &cli.command {
        return validate(path);
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Gdy { .. } | Error::Invariant { .. } => ExitCode::from(EXIT_INVALID),
                _ => ExitCode::from(EXIT_USAGE),
            }
        }
    }
}

