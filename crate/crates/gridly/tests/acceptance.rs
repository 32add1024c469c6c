//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Run with `cargo test -p gridly --test acceptance`.

use std::alloc::{GlobalAlloc, Layout, System};
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use gridly::bench::measure;
use gridly::core::engine::{relative_transform, Direction, Game, GridState, Status};
use gridly::core::env::{EnvOptions, Environment, Observation, ObserverKind, PlayerAction, StepResult};
use gridly::core::gdy::{self, CompareOp, Expr};
use gridly::pack::Pack;
use gridly::solver::{self, Script};

struct CountingAlloc;

static COUNTING: AtomicBool = AtomicBool::new(false);
static ALLOCATIONS: AtomicU64 = AtomicU64::new(0);

unsafe impl GlobalAlloc for CountingAlloc {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        if COUNTING.load(Ordering::Relaxed) {
            ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        }
        unsafe { System.alloc(layout) }
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) }
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        if COUNTING.load(Ordering::Relaxed) {
            ALLOCATIONS.fetch_add(1, Ordering::Relaxed);
        }
        unsafe { System.realloc(ptr, layout, new_size) }
    }
}

#[global_allocator]
static GLOBAL: CountingAlloc = CountingAlloc;

const FIDELITY_BUDGET: Duration = Duration::from_secs(1);
const DETERMINISM_ROLLOUTS: u64 = 100;
const DETERMINISM_STEPS: u64 = 1000;
const DETERMINISM_BUDGET: Duration = Duration::from_secs(120);
const SOLVE_BUDGET: Duration = Duration::from_secs(10);
const SOLVE_STATE_LIMIT: usize = 5_000_000;
const EGOCENTRIC_STEPS: u64 = 200;
const THROUGHPUT_STEPS: u64 = 1_000_000;
const THROUGHPUT_MIN_RATIO: f64 = 5.0;
const THROUGHPUT_BUDGET: Duration = Duration::from_secs(300);
const ALLOC_WARMUP_STEPS: u64 = 10_000;
const ALLOC_STEPS: u64 = 100_000;
const DIVERGE_ACTIONS: usize = 10;
const DIVERGE_TRIALS: u64 = 200;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let holds: bool = $cond;
        if !holds {
            return Err(format!($($fmt)+));
        }
    };
}

fn games_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

fn pack() -> Pack {
    Pack::load(&games_dir()).expect("bundled manifest")
}

fn sokoban() -> Arc<Game> {
    Arc::new(pack().entry("sokoban").unwrap().game().unwrap())
}

fn environment(game: &Arc<Game>, level: usize, seed: u64, kind: ObserverKind) -> Environment {
    let options = EnvOptions {
        level,
        seed,
        ..EnvOptions::default()
    };
    Environment::new(Arc::clone(game), options, kind).unwrap()
}

fn gdy_fidelity() -> Outcome {
    let start = Instant::now();
    let text = std::fs::read_to_string(games_dir().join("sokoban.gdy")).map_err(|e| e.to_string())?;
    let desc = gdy::parse_gdy(&text).map_err(|e| e.to_string())?;
    let game = Game::new(desc.clone()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    ensure!(desc.name == "sokoban", "name {:?}", desc.name);
    ensure!(game.level_count() == 2, "{} levels", game.level_count());
    ensure!(game.level_size(0) == Some((7, 7)), "level 0 is {:?}", game.level_size(0));
    ensure!(game.level_size(1) == Some((9, 8)), "level 1 is {:?}", game.level_size(1));
    let win = &desc.termination.win;
    ensure!(
        win.len() == 1
            && win[0].op == CompareOp::Eq
            && win[0].lhs == Expr::Count("box".into())
            && win[0].rhs == Expr::Literal(0),
        "win conditions {win:?}"
    );
    let o = desc.player.observer;
    ensure!(
        o.width == Some(7) && o.height == Some(7),
        "observer {:?}x{:?}",
        o.width,
        o.height
    );
    ensure!(o.rotate_with_avatar && o.track_avatar, "observer flags {o:?}");
    ensure!(o.offset_x == 0 && o.offset_y == 2, "offsets {o:?}");
    ensure!(elapsed < FIDELITY_BUDGET, "took {elapsed:?}");
    Ok(format!("parsed in {elapsed:?}"))
}

/// Per-step digests of a seeded random rollout, checking grid consistency,
/// type-count conservation and reward accounting at every step.
fn rollout_digests(game: &Arc<Game>, seed: u64) -> Result<Vec<u64>, String> {
    let mut env = environment(game, 0, seed, ObserverKind::Vector);
    let mut digests = Vec::with_capacity(DETERMINISM_STEPS as usize);
    let mut out = StepResult::default();
    let mut episode_sum = 0;
    for step in 0..DETERMINISM_STEPS {
        let action = env.sample_action(1);
        env.step_into(&[action], &mut out).map_err(|e| e.to_string())?;
        episode_sum += out.rewards[0];
        let state = env.state();
        state
            .verify(game)
            .map_err(|v| format!("seed {seed} step {step}: {v}"))?;
        let counted: usize = (0..game.types().len()).map(|t| state.type_count(t) as usize).sum();
        ensure!(
            counted == state.live_count(),
            "seed {seed} step {step}: type counts {counted} != live {}",
            state.live_count()
        );
        ensure!(
            env.episode_rewards()[0] == episode_sum,
            "seed {seed} step {step}: episode reward {} != summed {episode_sum}",
            env.episode_rewards()[0]
        );
        digests.push(env.digest());
        if out.terminated {
            env.restart(None).map_err(|e| e.to_string())?;
            episode_sum = 0;
        }
    }
    Ok(digests)
}

fn determinism() -> Outcome {
    let start = Instant::now();
    let pack = pack();
    for entry in &pack.games {
        let game = Arc::new(entry.game().map_err(|e| e.to_string())?);
        for seed in 0..DETERMINISM_ROLLOUTS {
            let first = rollout_digests(&game, seed)?;
            let second = rollout_digests(&game, seed)?;
            if let Some(step) = first.iter().zip(&second).position(|(a, b)| a != b) {
                return Err(format!("{} seed {seed}: digests diverge at step {step}", entry.name));
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < DETERMINISM_BUDGET, "took {elapsed:?}");
    Ok(format!(
        "{} games x {DETERMINISM_ROLLOUTS} rollouts x {DETERMINISM_STEPS} steps twice in {elapsed:?}",
        pack.games.len()
    ))
}

fn relative_math() -> Outcome {
    // Clockwise quarter turn in screen coordinates (y grows downwards).
    let turn = |[x, y]: [i32; 2]| [-y, x];
    let vectors = [[0, -1], [1, 0], [0, 1], [-1, 0], [1, -1], [1, 1], [-1, 1], [-1, -1]];
    let mut checked = 0;
    for (k, facing) in [Direction::Up, Direction::Right, Direction::Down, Direction::Left]
        .into_iter()
        .enumerate()
    {
        for v in vectors {
            let mut expected = v;
            for _ in 0..k {
                expected = turn(expected);
            }
            let got = relative_transform(facing, v);
            ensure!(got == expected, "{facing:?} {v:?}: got {got:?}, want {expected:?}");
            checked += 1;
        }
        let mut d = facing;
        for _ in 0..4 {
            d = d.turn_left();
        }
        ensure!(d == facing, "four left turns from {facing:?} gave {d:?}");
    }
    Ok(format!("{checked} cases"))
}

fn sokoban_solve() -> Outcome {
    let game = sokoban();
    let start = Instant::now();
    let solution = solver::solve(&game, 0, SOLVE_STATE_LIMIT)
        .map_err(|e| e.to_string())?
        .ok_or("no solution found")?;
    let elapsed = start.elapsed();
    let actions = Script::from_moves(&game, &solution.moves)
        .actions(&game)
        .map_err(|e| e.to_string())?;
    let mut env = environment(&game, 0, 0, ObserverKind::Vector);
    let mut total = 0;
    let mut status = Status::Ongoing;
    for action in actions {
        let result = env.step(&[action]).map_err(|e| e.to_string())?;
        total += result.rewards[0];
        status = result.info.status;
    }
    let boxes = env.state().type_count(game.type_id("box").unwrap());
    ensure!(total == 3, "reward {total}");
    ensure!(status == Status::Won(1), "status {status:?}");
    ensure!(boxes == 0, "{boxes} boxes left");
    ensure!(elapsed < SOLVE_BUDGET, "took {elapsed:?}");
    Ok(format!(
        "{} moves, {} states, {elapsed:?}",
        solution.moves.len(),
        solution.explored
    ))
}

/// numpy.rot90 with k=1: a quarter turn counter-clockwise.
fn rot90(m: &[Vec<i8>]) -> Vec<Vec<i8>> {
    let (h, w) = (m.len(), m[0].len());
    (0..w).map(|i| (0..h).map(|j| m[j][w - 1 - i]).collect()).collect()
}

/// Channel planes of the full level, rotated until the avatar faces up and
/// cropped to the window around it.
fn egocentric_oracle(game: &Game, state: &GridState, width: i64, height: i64, offset: (i64, i64)) -> Vec<i8> {
    let (gw, gh) = (state.width() as usize, state.height() as usize);
    let avatar = state.instance(state.find(game.avatar_type().unwrap(), 1).unwrap()).unwrap();
    let turns = avatar.orientation.quarter_turns();
    let mut out = Vec::new();
    for channel in 0..game.types().len() {
        let mut plane = vec![vec![0i8; gw]; gh];
        for (_, inst) in state.instances() {
            if inst.type_id == channel {
                plane[inst.y as usize][inst.x as usize] = 1;
            }
        }
        let mut marker = vec![vec![0i8; gw]; gh];
        marker[avatar.y as usize][avatar.x as usize] = 1;
        for _ in 0..turns {
            plane = rot90(&plane);
            marker = rot90(&marker);
        }
        let (ay, ax) = (0..marker.len())
            .flat_map(|r| (0..marker[0].len()).map(move |c| (r, c)))
            .find(|&(r, c)| marker[r][c] == 1)
            .unwrap();
        let (anchor_x, anchor_y) = (width / 2 + offset.0, height / 2 + offset.1);
        for wy in 0..height {
            for wx in 0..width {
                let r = ay as i64 + wy - anchor_y;
                let c = ax as i64 + wx - anchor_x;
                let inside = r >= 0 && c >= 0 && (r as usize) < plane.len() && (c as usize) < plane[0].len();
                out.push(if inside { plane[r as usize][c as usize] } else { 0 });
            }
        }
    }
    out
}

fn egocentric_equivalence() -> Outcome {
    let game = sokoban();
    let config = game.description().player.observer;
    let (w, h) = (config.width.unwrap() as i64, config.height.unwrap() as i64);
    let (ox, oy) = (config.offset_x as i64, config.offset_y as i64);
    let avatar_channel = game.avatar_type().unwrap() as u32;
    let (ax, ay) = ((w / 2 + ox) as u32, (h / 2 + oy) as u32);
    let mut env = environment(&game, 0, 11, ObserverKind::Vector);
    let mut observation = env.observe(1).map_err(|e| e.to_string())?;
    let mut out = StepResult::default();
    for step in 0..=EGOCENTRIC_STEPS {
        let v = observation.as_vector().unwrap();
        let expected = egocentric_oracle(&game, env.state(), w, h, (ox, oy));
        ensure!(v.data == expected, "step {step}: observation differs from oracle");
        ensure!(v.get(avatar_channel, ay, ax) == 1, "step {step}: avatar not at ({ax},{ay})");
        ensure!(v.channel_sum(avatar_channel) == 1, "step {step}: avatar channel sum");
        let action = env.sample_action(1);
        env.step_into(&[action], &mut out).map_err(|e| e.to_string())?;
        if out.terminated {
            env.restart(None).map_err(|e| e.to_string())?;
            observation = env.observe(1).map_err(|e| e.to_string())?;
        } else {
            observation = out.observations[0].clone();
        }
    }
    Ok(format!("{EGOCENTRIC_STEPS} steps, avatar fixed at ({ax},{ay})"))
}

fn observer_purity() -> Outcome {
    let mut checked = 0;
    for entry in pack().games {
        let game = Arc::new(entry.game().map_err(|e| e.to_string())?);
        let mut env = environment(&game, 0, 3, ObserverKind::Vector);
        for step in 0..100 {
            let before = env.digest();
            let mut first: Vec<Observation> = Vec::new();
            for kind in [ObserverKind::Vector, ObserverKind::Ascii, ObserverKind::Block] {
                first.push(env.global_observe(kind));
                ensure!(env.digest() == before, "{} step {step}: global {kind:?} changed state", entry.name);
            }
            let own = env.observe(1).ok();
            ensure!(env.digest() == before, "{} step {step}: player observe changed state", entry.name);
            for (kind, obs) in [ObserverKind::Block, ObserverKind::Ascii, ObserverKind::Vector]
                .into_iter()
                .zip(first.iter().rev())
            {
                ensure!(env.global_observe(kind) == *obs, "{} step {step}: {kind:?} not repeatable", entry.name);
            }
            ensure!(env.observe(1).ok() == own, "{} step {step}: player view not repeatable", entry.name);
            checked += 1;
            let action = env.sample_action(1);
            if env.step(&[action]).map_err(|e| e.to_string())?.terminated {
                env.restart(None).map_err(|e| e.to_string())?;
            }
        }
    }
    Ok(format!("{checked} interleaved observation rounds"))
}

fn throughput() -> Outcome {
    let game = sokoban();
    let start = Instant::now();
    let mut vector_env = environment(&game, 0, 5, ObserverKind::Vector);
    let vector = measure(&mut vector_env, THROUGHPUT_STEPS).map_err(|e| e.to_string())?;
    let mut block_env = environment(&game, 0, 5, ObserverKind::Block);
    let block = measure(&mut block_env, THROUGHPUT_STEPS).map_err(|e| e.to_string())?;
    let ratio = vector / block;

    let mut env = environment(&game, 0, 9, ObserverKind::Vector);
    let mut out = StepResult::default();
    let mut actions = [PlayerAction::NoOp];
    let mut run = |steps: u64, env: &mut Environment| -> Result<(), String> {
        for _ in 0..steps {
            actions[0] = env.sample_action(1);
            env.step_into(&actions, &mut out).map_err(|e| e.to_string())?;
            if out.terminated {
                env.restart(None).map_err(|e| e.to_string())?;
            }
        }
        Ok(())
    };
    run(ALLOC_WARMUP_STEPS, &mut env)?;
    ALLOCATIONS.store(0, Ordering::SeqCst);
    COUNTING.store(true, Ordering::SeqCst);
    let result = run(ALLOC_STEPS, &mut env);
    COUNTING.store(false, Ordering::SeqCst);
    result?;
    let allocations = ALLOCATIONS.load(Ordering::SeqCst);
    let elapsed = start.elapsed();

    let summary = format!(
        "vector {vector:.0} steps/s, block {block:.0} steps/s, ratio {ratio:.1} (min {THROUGHPUT_MIN_RATIO}), \
         {allocations} allocations over {ALLOC_STEPS} vector steps, {elapsed:.1?}"
    );
    ensure!(ratio >= THROUGHPUT_MIN_RATIO, "{summary}");
    ensure!(allocations == 0, "{summary}");
    ensure!(elapsed < THROUGHPUT_BUDGET, "{summary}");
    Ok(summary)
}

fn clone_and_diverge() -> Outcome {
    let mut diverged = 0;
    for entry in pack().games {
        let game = Arc::new(entry.game().map_err(|e| e.to_string())?);
        let mut env = environment(&game, 0, 21, ObserverKind::Vector);
        for trial in 0..DIVERGE_TRIALS {
            let original = env.digest();
            let snapshot = env.state().clone();
            let snapshot_digest = snapshot.digest(&game);
            let mut fork = env.clone();
            for _ in 0..DIVERGE_ACTIONS {
                let action = fork.sample_action(1);
                fork.step(&[action]).map_err(|e| e.to_string())?;
                ensure!(env.digest() == original, "{} trial {trial}: original changed", entry.name);
            }
            ensure!(env.state().digest(&game) == snapshot_digest && snapshot.live_count() == env.state().live_count(), "{} trial {trial}: state differs", entry.name);
            if fork.digest() != original {
                diverged += 1;
            }
            let action = env.sample_action(1);
            if env.step(&[action]).map_err(|e| e.to_string())?.terminated {
                env.restart(None).map_err(|e| e.to_string())?;
            }
        }
    }
    ensure!(diverged > 0, "no fork ever diverged");
    Ok(format!("{diverged} forks diverged, originals untouched"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("gdy fidelity", gdy_fidelity),
        ("determinism", determinism),
        ("relative-math oracle", relative_math),
        ("sokoban solve", sokoban_solve),
        ("egocentric equivalence", egocentric_equivalence),
        ("observer purity", observer_purity),
        ("throughput", throughput),
        ("forward model clone", clone_and_diverge),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|payload| {
            let message = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {message}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("{} of {} criteria passed", 8 - failed, 8);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
