use fcl::envs::{build_game, game_names};
use fcl::game::{file, GameSpec};
use fcl::Error;

fn same_game(a: &GameSpec, b: &GameSpec) {
    assert_eq!(a.name(), b.name());
    assert_eq!(a.num_players(), b.num_players());
    assert_eq!(a.num_states(), b.num_states());
    assert_eq!(a.max_stage_steps(), b.max_stage_steps());
    assert_eq!(a.initial_distribution(), b.initial_distribution());
    assert_eq!(a.stored_symmetries(), b.stored_symmetries());
    for s in 0..a.num_states() {
        assert_eq!(a.is_absorbing(s), b.is_absorbing(s));
        assert_eq!(a.state_label(s), b.state_label(s));
        for j in 0..a.num_joint_actions() {
            assert_eq!(a.outcomes(s, j), b.outcomes(s, j), "{} s={s} j={j}", a.name());
        }
    }
}

#[test]
fn every_bundled_game_roundtrips_through_text() {
    for name in game_names() {
        let game = build_game(name).unwrap();
        let parsed = file::parse(&file::to_text(&game)).unwrap();
        same_game(&game, &parsed);
    }
}

#[test]
fn save_and_load() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cake.game");
    let game = build_game("cake").unwrap();
    file::save(&game, &path).unwrap();
    same_game(&game, &file::load(&path).unwrap());
}

#[test]
fn asymmetric_custom_game_is_rejected() {
    // A claimed swap symmetry that the payoffs do not respect.
    let text = "name lopsided\nplayers 2\nstates 1\nactions 0 a b\nactions 1 a b\ninitial 1\nmax_stage_steps 1\n\
t 0 0 0 1 1 1\nt 0 1 0 1 0 5\nt 0 2 0 1 0 0\nt 0 3 0 1 2 2\nsymmetry 1 0 | 0 | 0 1\n";
    assert!(file::parse(text).is_err());
}

#[test]
fn probabilities_must_sum_to_one() {
    let text = "name p\nplayers 2\nstates 1\nactions 0 a\nactions 1 a\ninitial 1\nmax_stage_steps 1\nt 0 0 0 0.5 1 1\n";
    assert!(file::parse(text).is_err());
}

#[test]
fn malformed_number_reports_its_line() {
    let text = "name p\nplayers 2\nstates one\n";
    match file::parse(text) {
        Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("unexpected {other:?}"),
    }
}
