use std::path::Path;
use std::process::{Command, Output};

fn fcl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fcl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn list_games_prints_nine_names() {
    let o = fcl(&["list-games"]);
    assert!(o.status.success());
    let names: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(names.len(), 9);
    assert!(names.contains(&"temptation".to_string()));
}

#[test]
fn oracle_report_matches_golden_files() {
    for name in ["ipd", "aipd", "ich", "rps", "cake"] {
        let o = fcl(&["oracle", "--game", name]);
        assert!(o.status.success(), "{name}");
        let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/{name}.txt"));
        let expected = std::fs::read_to_string(golden).unwrap();
        assert_eq!(stdout(&o), expected, "{name}");
    }
}

#[test]
fn verify_rps_notes_unbounded_retaliation() {
    let o = fcl(&["verify", "--game", "rps"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("UNBOUNDED"), "{out}");
    assert!(out.contains("symmetry: PASS"));
}

#[test]
fn verify_passes_on_a_grid() {
    let o = fcl(&["verify", "--game", "coordination"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(!stdout(&o).contains("FAIL"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(fcl(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(fcl(&["oracle", "--bogus", "x"]).status.code(), Some(2));
    assert_eq!(fcl(&["oracle"]).status.code(), Some(2));
}

#[test]
fn unknown_game_is_reported() {
    let o = fcl(&["oracle", "--game", "nosuch"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("nosuch"));
}

#[test]
fn exported_game_file_gives_the_same_oracle_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("aipd.game");
    let path_str = path.to_str().unwrap();
    assert!(fcl(&["export-game", "--game", "aipd", "--output", path_str]).status.success());
    let from_file = stdout(&fcl(&["oracle", "--game", path_str]));
    let bundled = stdout(&fcl(&["oracle", "--game", "aipd"]));
    assert_eq!(from_file, bundled);
}

#[test]
fn run_writes_csv_and_repeats_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("ipd.toml");
    std::fs::write(
        &config,
        "game = \"ipd\"\nnum_runs = 3\nnum_stages = 300\nbase_seed = 9\n[[seats]]\nalgo = \"qlearning\"\n[[seats]]\nalgo = \"fcl\"\n",
    )
    .unwrap();
    let mut files = Vec::new();
    for k in 0..2 {
        let csv = dir.path().join(format!("out{k}.csv"));
        let o = fcl(&["run", "--config", config.to_str().unwrap(), "--output", csv.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains("minimax -2"));
        files.push(std::fs::read_to_string(csv).unwrap());
    }
    assert_eq!(files[0], files[1]);
    assert_eq!(files[0].lines().next(), Some("run,stage,seat,algo,stage_return,cum_avg"));
    assert_eq!(files[0].lines().count(), 1 + 3 * 300 * 2);
}

#[test]
fn bad_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    std::fs::write(&config, "game = \"cake\"\nnum_stages = 5\n[[seats]]\nalgo = \"fcl\"\n").unwrap();
    let o = fcl(&["run", "--config", config.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seats"));
}
