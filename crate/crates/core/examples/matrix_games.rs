//! Prints the payoff tables of the bundled one-shot games.

use fcl::envs::{build_game, MATRIX_GAMES};

fn main() -> fcl::Result<()> {
    for name in MATRIX_GAMES {
        let game = build_game(name)?;
        println!("{name}");
        for a0 in 0..game.num_actions(0) {
            for a1 in 0..game.num_actions(1) {
                let j = game.joint().encode(&[a0, a1]);
                let r = game.expected_rewards(0, j);
                println!(
                    "  {:>2} {:>2}  -> {:>5} {:>5}",
                    game.action_labels(0)[a0],
                    game.action_labels(1)[a1],
                    r[0],
                    r[1]
                );
            }
        }
    }
    Ok(())
}
