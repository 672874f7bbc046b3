//! The three-player cake game: sharing, robbing and poisoning. Shows the
//! payoff rule, the exact values, and how two cooperative learners respond to
//! a persistent robber.

use fcl::envs::cake::{cake_rewards, POISON, ROB, SHARE};
use fcl::envs::build_game;
use fcl::harness::{run_experiment, summarize, ExperimentConfig, SeatSpec, LATE_FRACTION};
use fcl::oracle::exact_values;

fn main() -> fcl::Result<()> {
    let labels = ["share", "rob", "poison"];
    for actions in [[SHARE, SHARE, SHARE], [ROB, SHARE, SHARE], [ROB, POISON, SHARE], [ROB, ROB, SHARE]] {
        let names: Vec<&str> = actions.iter().map(|&a| labels[a]).collect();
        println!("{:?} -> {:?}", names, cake_rewards(&actions)?);
    }

    let game = build_game("cake")?;
    print!("{}", exact_values(&game, 1.0)?.report());

    for robber in ["always_defect", "qlearning"] {
        let seats = vec![SeatSpec::new(robber), SeatSpec::new("fcl"), SeatSpec::new("fcl")];
        let config = ExperimentConfig::new("cake", 5, 2000, seats);
        let summary = summarize(&run_experiment(&config)?.rows, config.window)?;
        let (m, s) = summary.seats[0].late_window(LATE_FRACTION);
        println!("{robber} against two cooperative learners: late mean {m:.4} ± {s:.4}");
    }
    Ok(())
}
