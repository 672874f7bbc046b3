//! N-player cake game: every player shares, robs or poisons.
//!
//! States: 0 is the table, 1 means the cake was shared, `2 + k` means player
//! `k` won the robbery lottery. Only state 0 is played, so each stage is one
//! step; the lottery is a random transition so that rewards stay a function of
//! the outcome.

use crate::error::{ensure, validation, Result};
use crate::game::{labels, GameBuilder, GameSpec, PlayerPermutation, Symmetry};

pub const SHARE: usize = 0;
pub const ROB: usize = 1;
pub const POISON: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct CakeGameDef {
    pub num_players: usize,
}

/// Poison cost `n_p / (N - 1)`.
fn poison_cost(actions: &[usize]) -> f64 {
    let np = actions.iter().filter(|&&a| a == POISON).count();
    np as f64 / (actions.len() - 1) as f64
}

/// Expected reward vector of a cake profile, with the robbery lottery averaged.
pub fn cake_rewards(actions: &[usize]) -> Result<Vec<f64>> {
    let n = actions.len();
    ensure!(n >= 2, "cake game needs at least 2 players");
    ensure!(actions.iter().all(|&a| a <= POISON), "cake actions are share, rob, poison");
    let mut out = vec![0.0; n];
    for (p, winner) in lottery(actions) {
        for (i, r) in rewards_given(actions, winner).into_iter().enumerate() {
            out[i] += p * r;
        }
    }
    Ok(out)
}

/// Possible robbery winners with probabilities; `None` when nobody robs.
fn lottery(actions: &[usize]) -> Vec<(f64, Option<usize>)> {
    let robbers: Vec<usize> = (0..actions.len()).filter(|&i| actions[i] == ROB).collect();
    if robbers.is_empty() {
        return vec![(1.0, None)];
    }
    let p = 1.0 / robbers.len() as f64;
    robbers.into_iter().map(|k| (p, Some(k))).collect()
}

fn rewards_given(actions: &[usize], winner: Option<usize>) -> Vec<f64> {
    let n = actions.len();
    let c = poison_cost(actions);
    let mut out = vec![0.0; n];
    match winner {
        Some(k) => out[k] = 0.5 - c,
        None => {
            let ns = actions.iter().filter(|&&a| a == SHARE).count();
            if ns > 0 {
                for i in 0..n {
                    if actions[i] == SHARE {
                        out[i] = (1.0 - c) / ns as f64;
                    }
                }
            }
        }
    }
    out
}

impl CakeGameDef {
    pub fn new(num_players: usize) -> Result<Self> {
        if num_players < 2 {
            return Err(validation("num_players", "cake game needs at least 2 players"));
        }
        Ok(Self { num_players })
    }

    pub fn build(&self) -> Result<GameSpec> {
        let n = self.num_players;
        let acts = labels(&["share", "rob", "poison"]);
        let num_states = 2 + n;
        let name = if n == 3 { "cake".to_string() } else { format!("cake{n}") };
        let mut b = GameBuilder::new(name, num_states, vec![acts; n]);
        let js = crate::game::JointSpace::new(&vec![3; n]);
        for a in 0..js.len() {
            let actions = js.decode(a).0;
            for (p, winner) in lottery(&actions) {
                let next = winner.map_or(1, |k| 2 + k);
                b.outcome(0, a, next, p, rewards_given(&actions, winner));
            }
        }
        for s in 1..num_states {
            b.absorbing(s);
        }
        let mut state_labels = vec!["table".to_string(), "shared".to_string()];
        state_labels.extend((0..n).map(|k| format!("robbed_by_{k}")));
        b.max_stage_steps(1).state_labels(state_labels);

        // Player relabellings move the robbery-winner states along with the players.
        let perms = if n <= 5 {
            PlayerPermutation::all(n)
        } else {
            let sigma = crate::game::cyclic_permutation(n)?;
            (0..n as u64).map(|k| sigma.pow(k)).collect()
        };
        for psi in perms.into_iter().filter(|p| !p.is_identity()) {
            let mut states = vec![0, 1];
            states.extend((0..n).map(|k| 2 + psi.apply(k)));
            b.symmetry(Symmetry {
                players: psi,
                states,
                actions: vec![SHARE, ROB, POISON],
            });
        }
        b.build()
    }
}

pub fn build_cake_game(num_players: usize) -> Result<GameSpec> {
    CakeGameDef::new(num_players)?.build()
}
