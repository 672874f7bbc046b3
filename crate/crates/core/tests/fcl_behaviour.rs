use std::sync::Arc;

use fcl::baselines::FixedAgent;
use fcl::envs::build_game;
use fcl::envs::cake::{ROB, SHARE};
use fcl::fcl::{FclAgent, FclConfig, RetaliationCount};
use fcl::game::{Agent, GameSpec, Match, Observation, Transition};

/// Plays `base` except at the listed stages, where it plays `deviation`.
struct Scripted {
    base: usize,
    deviation: usize,
    stages: Vec<u64>,
}

impl Agent for Scripted {
    fn name(&self) -> &str {
        "scripted"
    }

    fn act(&mut self, obs: &Observation) -> usize {
        if self.stages.contains(&obs.stage) {
            self.deviation
        } else {
            self.base
        }
    }

    fn observe(&mut self, _tr: &Transition) {}
}

fn game(name: &str) -> Arc<GameSpec> {
    Arc::new(build_game(name).unwrap())
}

fn fcl_seat(game: &Arc<GameSpec>, seat: usize, seed: u64) -> Box<dyn Agent> {
    let config = FclConfig {
        team_seed: seed,
        ..FclConfig::default()
    };
    Box::new(FclAgent::new(game.clone(), seat, &config).unwrap())
}

#[test]
fn self_play_never_flags_a_defection() {
    for name in ["ipd", "aipd", "ich", "rps", "cake", "coordination"] {
        let g = game(name);
        let config = FclConfig {
            team_seed: 4,
            ..FclConfig::default()
        };
        let team = FclAgent::team(&g, &config).unwrap();
        let mut m = Match::new(g.clone(), team, 1).unwrap();
        for _ in 0..500 {
            m.play_stage().unwrap();
        }
        for a in m.agents() {
            assert!(a.defection_log().is_empty(), "{name}");
            assert_eq!(a.retaliation_target(), None);
        }
        // Replicas hold identical tables.
        let first = m.agents()[0].qc();
        assert!(m.agents().iter().all(|a| a.qc() == first), "{name}");
    }
}

#[test]
fn ipd_always_defect_is_punished_for_two_stages() {
    let g = game("ipd");
    let agents: Vec<Box<dyn Agent>> = vec![
        Box::new(FixedAgent::new(&g, 0, 1, "always_defect").unwrap()),
        fcl_seat(&g, 1, 3),
    ];
    let mut m = Match::new(g.clone(), agents, 2).unwrap();
    for _ in 0..1000 {
        m.play_stage().unwrap();
    }
    let last = m.agents()[1].defection_log().last().cloned().expect("defections logged");
    assert_eq!(last.defector, 0);
    assert_eq!(last.count, RetaliationCount::Finite(2));
    // Late cycle: one defection stage followed by two punished stages.
    let mut returns = Vec::new();
    for _ in 0..30 {
        returns.push(m.play_stage().unwrap().stage_returns[0]);
    }
    let mean = returns.iter().sum::<f64>() / 30.0;
    assert!((mean - (-4.0 / 3.0)).abs() < 1e-9, "{returns:?}");
}

#[test]
fn fcl_forgives_after_the_punishment() {
    let g = game("ipd");
    let agents: Vec<Box<dyn Agent>> = vec![
        Box::new(Scripted {
            base: 0,
            deviation: 1,
            stages: vec![300],
        }),
        fcl_seat(&g, 1, 8),
    ];
    let mut m = Match::new(g.clone(), agents, 2).unwrap();
    let mut fcl_moves = Vec::new();
    for _ in 0..306 {
        let rec = m.play_stage().unwrap();
        fcl_moves.push(rec.trajectory[0].actions.0[1]);
    }
    // Cooperates, punishes during the two stages after the defection, then
    // returns to cooperation.
    assert_eq!(&fcl_moves[298..306], &[0, 0, 0, 1, 1, 0, 0, 0]);
}

/// Runs an FCL replica and follows it, except at one stage where it plays a
/// different action than the team expects.
struct Turncoat {
    inner: FclAgent,
    stage: u64,
}

impl Agent for Turncoat {
    fn name(&self) -> &str {
        "turncoat"
    }

    fn act(&mut self, obs: &Observation) -> usize {
        let a = self.inner.act(obs);
        if obs.stage == self.stage {
            (a + 1) % self.inner.game().num_actions(obs.seat)
        } else {
            a
        }
    }

    fn observe(&mut self, tr: &Transition) {
        self.inner.observe(tr);
    }

    fn end_stage(&mut self, record: &fcl::game::StageRecord) {
        self.inner.end_stage(record);
    }
}

#[test]
fn a_new_defector_replaces_the_target() {
    let g = game("cake");
    let config = FclConfig {
        team_seed: 5,
        ..FclConfig::default()
    };
    let agents: Vec<Box<dyn Agent>> = vec![
        Box::new(Scripted {
            base: SHARE,
            deviation: ROB,
            stages: vec![400],
        }),
        Box::new(Turncoat {
            inner: FclAgent::new(g.clone(), 1, &config).unwrap(),
            stage: 401,
        }),
        Box::new(FclAgent::new(g.clone(), 2, &config).unwrap()),
    ];
    let mut m = Match::new(g.clone(), agents, 3).unwrap();
    for _ in 0..401 {
        m.play_stage().unwrap();
    }
    let log = m.agents()[2].defection_log().to_vec();
    assert_eq!(log.last().map(|e| (e.defector, e.stage)), Some((0, 400)));
    m.play_stage().unwrap();
    let log = m.agents()[2].defection_log().to_vec();
    assert_eq!(log.last().map(|e| (e.defector, e.stage)), Some((1, 401)));
}

#[test]
fn rps_defector_faces_endless_retaliation_value() {
    let g = game("rps");
    let config = FclConfig {
        epsilon: 1.0,
        decay: 1.0,
        team_seed: 1,
        ..FclConfig::default()
    };
    let team = FclAgent::team(&g, &config).unwrap();
    let mut m = Match::new(g.clone(), team, 1).unwrap();
    for _ in 0..2000 {
        m.play_stage().unwrap();
    }
    let (vc, vr, _) = m.agents_mut()[0].value_estimates(1);
    assert!((vc - vr).abs() < 1e-6, "vc {vc} vr {vr}");
}
