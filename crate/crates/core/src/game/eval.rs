use rand::Rng;

use super::{GameSpec, PlayerPermutation, Symmetry};
use crate::error::{ensure, Result};

/// A (possibly time-dependent) policy profile: the probability that `player`
/// chooses `action` in `state` at step `step` of a stage.
pub trait Profile {
    fn prob(&self, player: usize, state: usize, step: usize, action: usize) -> f64;
}

/// Stationary mixed profile, indexed `[player][state][action]`.
#[derive(Clone, Debug, PartialEq)]
pub struct StationaryProfile {
    pub probs: Vec<Vec<Vec<f64>>>,
}

impl StationaryProfile {
    pub fn uniform(game: &GameSpec) -> Self {
        Self::from_fn(game, |i, _, _| 1.0 / game.num_actions(i) as f64)
    }

    /// Random full-support profile, one Dirichlet(1)-like draw per state.
    pub fn random<R: Rng + ?Sized>(game: &GameSpec, rng: &mut R) -> Self {
        let mut p = Self::from_fn(game, |_, _, _| 0.0);
        for player in &mut p.probs {
            for row in player.iter_mut() {
                let w: Vec<f64> = row.iter().map(|_| -rng.gen::<f64>().max(1e-12).ln()).collect();
                let total: f64 = w.iter().sum();
                for (x, wi) in row.iter_mut().zip(w) {
                    *x = wi / total;
                }
            }
        }
        p
    }

    /// Deterministic profile from a per-(player, state) action choice.
    pub fn pure(game: &GameSpec, choose: impl Fn(usize, usize) -> usize) -> Self {
        Self::from_fn(game, |i, s, a| if choose(i, s) == a { 1.0 } else { 0.0 })
    }

    pub fn from_fn(game: &GameSpec, f: impl Fn(usize, usize, usize) -> f64) -> Self {
        let probs = (0..game.num_players())
            .map(|i| {
                (0..game.num_states())
                    .map(|s| (0..game.num_actions(i)).map(|a| f(i, s, a)).collect())
                    .collect()
            })
            .collect();
        Self { probs }
    }

    /// The profile as seen after relabelling by the game's symmetry for `psi`:
    /// `ρ_k(a | s) = π_{ψ(k)}(φ_A(a) | φ_S(s))`.
    pub fn transported(&self, game: &GameSpec, psi: &PlayerPermutation) -> Self {
        let g = game.symmetry(psi);
        Self::from_fn(game, |k, s, a| {
            self.probs[g.players.apply(k)][g.states[s]][g.actions[a]]
        })
    }
}

impl Profile for StationaryProfile {
    fn prob(&self, player: usize, state: usize, _step: usize, action: usize) -> f64 {
        self.probs[player][state][action]
    }
}

/// A profile seen through the game's symmetry for `psi`: player `k` does what
/// player `ψ(k)` of `inner` does in the mirrored state with mirrored actions.
pub struct TransportedProfile<'a, P: ?Sized> {
    inner: &'a P,
    g: Symmetry,
}

impl<'a, P: Profile + ?Sized> TransportedProfile<'a, P> {
    pub fn new(game: &GameSpec, inner: &'a P, psi: &PlayerPermutation) -> Self {
        Self {
            inner,
            g: game.symmetry(psi),
        }
    }
}

impl<P: Profile + ?Sized> Profile for TransportedProfile<'_, P> {
    fn prob(&self, player: usize, state: usize, step: usize, action: usize) -> f64 {
        self.inner
            .prob(self.g.players.apply(player), self.g.states[state], step, self.g.actions[action])
    }
}

/// Time-indexed pure joint profile: `joint[step][state]` is a joint-action index.
/// Steps past the end reuse the last entry.
#[derive(Clone, Debug, PartialEq)]
pub struct DeterministicProfile {
    pub joint: Vec<Vec<usize>>,
    pub(crate) sizes: Vec<usize>,
}

impl DeterministicProfile {
    pub fn new(game: &GameSpec, joint: Vec<Vec<usize>>) -> Self {
        Self {
            joint,
            sizes: game.joint().sizes().to_vec(),
        }
    }

    pub fn stationary(game: &GameSpec, per_state: Vec<usize>) -> Self {
        Self::new(game, vec![per_state])
    }

    pub fn joint_at(&self, state: usize, step: usize) -> usize {
        let t = step.min(self.joint.len() - 1);
        self.joint[t][state]
    }
}

impl Profile for DeterministicProfile {
    fn prob(&self, player: usize, state: usize, step: usize, action: usize) -> f64 {
        let mut idx = self.joint_at(state, step);
        let mut comp = 0;
        for (k, &n) in self.sizes.iter().enumerate().rev() {
            if k == player {
                comp = idx % n;
                break;
            }
            idx /= n;
        }
        if comp == action {
            1.0
        } else {
            0.0
        }
    }
}

/// Exact expected undiscounted stage return of every player over `horizon`
/// steps, stopping at absorbing states.
pub fn evaluate_profile<P: Profile + ?Sized>(game: &GameSpec, profile: &P, horizon: usize) -> Result<Vec<f64>> {
    ensure!(horizon >= 1, "horizon must be at least 1");
    let n = game.num_players();
    let js = game.joint();
    let mut dist = game.initial_distribution().to_vec();
    let mut next = vec![0.0; game.num_states()];
    let mut returns = vec![0.0; n];
    let mut comps = vec![0; n];
    for step in 0..horizon {
        next.iter_mut().for_each(|x| *x = 0.0);
        for s in 0..game.num_states() {
            let mass = dist[s];
            if mass == 0.0 {
                continue;
            }
            for a in 0..js.len() {
                js.decode_into(a, &mut comps);
                let mut p = mass;
                for (i, &c) in comps.iter().enumerate() {
                    p *= profile.prob(i, s, step, c);
                    if p == 0.0 {
                        break;
                    }
                }
                if p == 0.0 {
                    continue;
                }
                for o in game.outcomes(s, a) {
                    let q = p * o.prob;
                    for i in 0..n {
                        returns[i] += q * o.rewards[i];
                    }
                    if !game.is_absorbing(o.next) {
                        next[o.next] += q;
                    }
                }
            }
        }
        std::mem::swap(&mut dist, &mut next);
    }
    Ok(returns)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetryReport {
    pub passed: bool,
    pub max_deviation: f64,
}

/// Compares `R_{ψ(i)}(π)` with `R_i` under the relabelled profile for every
/// player, by exact finite-horizon evaluation. Passes when the largest gap is
/// below 1e-6.
pub fn check_symmetry(
    game: &GameSpec,
    psi: &PlayerPermutation,
    profile: &StationaryProfile,
    horizon: usize,
) -> Result<SymmetryReport> {
    ensure!(horizon >= 1, "horizon must be at least 1");
    ensure!(psi.len() == game.num_players(), "permutation length does not match the game");
    let original = evaluate_profile(game, profile, horizon)?;
    let moved = evaluate_profile(game, &profile.transported(game, psi), horizon)?;
    let max_deviation = (0..game.num_players())
        .map(|i| (original[psi.apply(i)] - moved[i]).abs())
        .fold(0.0, f64::max);
    Ok(SymmetryReport {
        passed: max_deviation < 1e-6,
        max_deviation,
    })
}
