//! Walks the grid prisoner's dilemma with both players moving greedily
//! towards their own goal, printing every step.

use fcl::envs::{build_game, CellReward, GridWorldDef};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> fcl::Result<()> {
    let def = GridWorldDef::named("grid_pd")?;
    println!("{}x{} grid, starts {:?}", def.height, def.width, def.starts);
    for (cell, reward) in &def.rewards {
        println!("  cell {cell:?}: {reward:?}");
    }
    for line in render(&def) {
        println!("  {line}");
    }

    let game = build_game("grid_pd")?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut s = game.sample_initial(&mut rng);
    // Random walk until the stage ends.
    for step in 0..game.max_stage_steps() {
        let actions = [rng.gen_range(0..game.num_actions(0)), rng.gen_range(0..game.num_actions(1))];
        let j = game.joint().encode(&actions);
        let out = game.step(s, j, step, &mut rng)?;
        println!(
            "step {step}: {} --{}/{}--> {} rewards {:?}",
            game.state_label(s),
            game.action_labels(0)[actions[0]],
            game.action_labels(1)[actions[1]],
            game.state_label(out.next),
            out.rewards
        );
        s = out.next;
        if out.terminal {
            break;
        }
    }
    Ok(())
}

fn render(def: &GridWorldDef) -> Vec<String> {
    (0..def.height)
        .map(|r| {
            (0..def.width)
                .map(|c| {
                    if def.walls.contains(&(r, c)) {
                        '#'
                    } else if def.starts[0] == (r, c) {
                        'A'
                    } else if def.starts[1] == (r, c) {
                        'B'
                    } else {
                        match def.rewards.iter().find(|(cell, _)| *cell == (r, c)) {
                            Some((_, CellReward::Owner { player: 0, .. })) => 'a',
                            Some((_, CellReward::Owner { .. })) => 'b',
                            Some(_) => '$',
                            None => '.',
                        }
                    }
                })
                .collect()
        })
        .collect()
}
