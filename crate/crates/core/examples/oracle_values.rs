//! Exact cooperative, minimax and defection values for a game, with the
//! retaliation count that keeps defection unprofitable.
//!
//! `cargo run --example oracle_values -- aipd`

use fcl::envs::build_game;
use fcl::oracle::{exact_values, fmt_value, folk_inequality_check};

fn main() -> fcl::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ipd".into());
    let game = build_game(&name)?;
    let values = exact_values(&game, 1.0)?;
    print!("{}", values.report());
    let folk = folk_inequality_check(&values);
    for (i, p) in values.players.iter().enumerate() {
        println!(
            "player {i}: defecting gains {} per stage, each punished stage costs {}, K = {}",
            fmt_value(p.v_defect - p.v_egalitarian),
            fmt_value(p.v_egalitarian - p.v_retaliate),
            p.k
        );
    }
    println!("folk inequality holds: {}", folk.passed);
    Ok(())
}
