use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn gridly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gridly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn games() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../games")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn validate_exit_codes() {
    let ok = gridly(&["validate", games().join("sokoban.gdy").to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.gdy");
    let text = std::fs::read_to_string(games().join("sokoban.gdy")).unwrap();
    std::fs::write(&bad, text.replacen("w..hA", "w.QhA", 1)).unwrap();
    let out = gridly(&["validate", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let diagnostics: Vec<_> = stderr(&out).lines().filter(|l| l.contains("error")).map(String::from).collect();
    assert_eq!(diagnostics.len(), 1, "{diagnostics:?}");
    assert!(diagnostics[0].contains("'Q'"));

    let missing = gridly(&["validate", dir.path().join("absent.gdy").to_str().unwrap()]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn run_random_is_deterministic_for_a_seed() {
    let args = [
        "run-random", "--game", "sokoban", "--level", "0", "--steps", "1000", "--seed", "42",
        "--observer", "vector",
    ];
    let a = gridly(&args);
    let b = gridly(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("steps=1000 "));
}

#[test]
fn run_random_zero_steps_reports_the_reset_digest() {
    use gridly::core::env::{EnvOptions, Environment, ObserverKind};
    let (_, game) = gridly::pack::resolve_game("sokoban").unwrap();
    let env = Environment::new(game, EnvOptions::default(), ObserverKind::Vector).unwrap();
    let out = gridly(&["run-random", "--game", "sokoban", "--steps", "0"]);
    assert_eq!(
        stdout(&out).trim(),
        format!("steps=0 episodes=0 total_reward=0 digest={:016x}", env.digest())
    );
}

#[test]
fn labyrinth_long_rollout_keeps_the_grid_consistent() {
    let out = gridly(&[
        "run-random", "--game", "labyrinth", "--level", "0", "--steps", "100000", "--seed", "7",
        "--check",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).starts_with("steps=100000 "));
}

#[test]
fn config_file_supplies_options_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "game = \"sokoban\"\nseed = 42\nsteps = 3\n").unwrap();
    let rejected = gridly(&["run-random", "--config", config.to_str().unwrap()]);
    assert_eq!(rejected.status.code(), Some(2));

    std::fs::write(&config, "game = \"sokoban\"\nseed = 42\nobserver = \"vector\"\n").unwrap();
    let from_file = gridly(&["run-random", "--config", config.to_str().unwrap()]);
    let from_flags = gridly(&["run-random", "--game", "sokoban", "--seed", "42"]);
    assert_eq!(stdout(&from_file), stdout(&from_flags));
    let overridden = gridly(&["run-random", "--config", config.to_str().unwrap(), "--seed", "43"]);
    assert_ne!(stdout(&overridden), stdout(&from_file));
}

#[test]
fn usage_errors_exit_two() {
    let low = gridly(&["bench", "--game", "sokoban", "--frames", "9999"]);
    assert_eq!(low.status.code(), Some(2));
    assert!(stderr(&low).contains("10000"));
    assert_eq!(gridly(&["run-random", "--game", "no-such-game"]).status.code(), Some(2));
    assert_eq!(gridly(&["run-random", "--game", "sokoban", "--observer", "sprite"]).status.code(), Some(2));
    assert_eq!(gridly(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn bench_prints_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = gridly(&[
        "bench", "--game", "sokoban", "--frames", "10000", "--observers", "vector,block", "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines[0], "game,observer,fps_mean,fps_std,mem_mb");
    assert_eq!(lines.len(), 3);
    let fps = |line: &str| line.split(',').nth(2).unwrap().parse::<f64>().unwrap();
    assert!(lines[1].starts_with("sokoban,vector,"));
    assert!(lines[2].starts_with("sokoban,block,"));
    assert!(fps(lines[1]) > fps(lines[2]));
    assert!(fps(lines[2]) > 0.0);
}

#[test]
fn bench_parallel_rows_are_labelled() {
    let out = gridly(&[
        "bench", "--game", "sokoban", "--frames", "10000", "--observers", "vector", "--parallel", "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("vector[parallel=2]"));
    assert!(stdout(&out).contains("aggregate"));
}

#[test]
fn record_writes_png_frames() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("frames");
    let out = gridly(&[
        "record", "--game", "sokoban", "--steps", "3", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mut frames: Vec<_> = std::fs::read_dir(&out_dir).unwrap().map(|e| e.unwrap().path()).collect();
    frames.sort();
    assert_eq!(frames.len(), 4);
    let bytes = std::fs::read(&frames[0]).unwrap();
    assert_eq!(&bytes[..8], b"\x89PNG\r\n\x1a\n");
}

#[test]
fn solve_writes_a_replayable_script() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zen.txt");
    let out = gridly(&["solve", "--game", "zen-puzzle", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let script = gridly::solver::Script::parse(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(script.len(), 10);
}
