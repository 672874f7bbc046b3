//! A team of foolproof cooperative learners playing together on a grid game.
//! The replicas share a team seed, so they keep identical tables and settle
//! on the same sum-maximising profile.

use std::sync::Arc;

use fcl::envs::build_game;
use fcl::fcl::{FclAgent, FclConfig};
use fcl::game::{Agent, Match};

fn main() -> fcl::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "compromise".into());
    let game = Arc::new(build_game(&name)?);
    let config = FclConfig {
        team_seed: 11,
        ..FclConfig::default()
    };
    let team = FclAgent::team(&game, &config)?;
    let mut m = Match::new(game.clone(), team, 3)?;
    let block = 2000;
    for b in 0..10 {
        let mut totals = vec![0.0; game.num_players()];
        for _ in 0..block {
            let rec = m.play_stage()?;
            for (t, r) in totals.iter_mut().zip(&rec.stage_returns) {
                *t += r;
            }
        }
        let avgs: Vec<String> = totals.iter().map(|t| format!("{:7.2}", t / block as f64)).collect();
        println!("stages {:>5}-{:>5}: {}", b * block, (b + 1) * block - 1, avgs.join(" "));
    }
    let flagged: usize = m.agents().iter().map(|a| a.defection_log().len()).sum();
    println!("defections flagged: {flagged}");
    Ok(())
}
