//! A foolproof cooperative learner facing a selfish Q-learner and a policy
//! gradient learner in the iterated prisoner's dilemma. Every detected
//! defection is met with punishment, so no opponent earns more than the
//! mutual cooperation payoff of -1.

use fcl::harness::{run_experiment, summarize, ExperimentConfig, SeatSpec, LATE_FRACTION};

fn main() -> fcl::Result<()> {
    for opponent in ["qlearning", "pg", "always_defect"] {
        let config = ExperimentConfig::new("ipd", 5, 2000, vec![SeatSpec::new(opponent), SeatSpec::new("fcl")]);
        let result = run_experiment(&config)?;
        let summary = summarize(&result.rows, config.window)?;
        print!("{opponent:>14} vs fcl:");
        for seat in &summary.seats {
            let (m, s) = seat.late_window(LATE_FRACTION);
            print!("  {} {m:.3} ± {s:.3}", seat.algo);
        }
        let punished: usize = result.records.iter().map(|r| r.retaliation_events.len()).sum();
        println!("  ({punished} punishments)");
    }
    Ok(())
}
