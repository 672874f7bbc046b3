//! Repeated symmetric stochastic games: the game description, stage
//! execution, player permutations and the symmetry checker.

mod eval;
pub mod file;
mod joint;
mod perm;
mod play;

use rand::Rng;

use crate::error::{ensure, validation, Error, Result};

pub use eval::{
    check_symmetry, evaluate_profile, DeterministicProfile, Profile, StationaryProfile,
    SymmetryReport, TransportedProfile,
};
pub use joint::{JointAction, JointSpace};
pub use perm::{cyclic_permutation, PlayerPermutation, Symmetry};
pub use play::{run_stage, Agent, Match, Observation, StageRecord, TrajectoryStep, Transition};

/// Tolerance used when checking that probability vectors sum to one.
pub const PROB_TOLERANCE: f64 = 1e-9;

/// One possible result of a (state, joint action) pair.
///
/// Rewards are attached to the outcome so that random contests (who enters a
/// cell, who wins a lottery) can pay different players while every reward
/// stays a deterministic function of `(s, a, s')`.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub next: usize,
    pub prob: f64,
    pub rewards: Vec<f64>,
}

/// Result of [`GameSpec::step`].
#[derive(Clone, Debug, PartialEq)]
pub struct StepResult<'a> {
    pub next: usize,
    pub rewards: &'a [f64],
    pub absorbing: bool,
    pub terminal: bool,
}

/// Immutable description of a repeated symmetric stochastic game.
#[derive(Clone, Debug)]
pub struct GameSpec {
    name: String,
    num_states: usize,
    action_labels: Vec<Vec<String>>,
    state_labels: Vec<String>,
    joint: JointSpace,
    outcomes: Vec<Vec<Outcome>>,
    expected_rewards: Vec<f64>,
    initial: Vec<f64>,
    absorbing: Vec<bool>,
    max_stage_steps: usize,
    symmetries: Vec<Symmetry>,
}

impl GameSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_players(&self) -> usize {
        self.action_labels.len()
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn num_actions(&self, player: usize) -> usize {
        self.action_labels[player].len()
    }

    pub fn joint(&self) -> &JointSpace {
        &self.joint
    }

    pub fn num_joint_actions(&self) -> usize {
        self.joint.len()
    }

    pub fn action_labels(&self, player: usize) -> &[String] {
        &self.action_labels[player]
    }

    pub fn action_index(&self, player: usize, label: &str) -> Result<usize> {
        self.action_labels[player]
            .iter()
            .position(|l| l.eq_ignore_ascii_case(label))
            .ok_or_else(|| Error::Lookup {
                kind: "action",
                name: label.to_string(),
            })
    }

    pub fn state_label(&self, s: usize) -> &str {
        &self.state_labels[s]
    }

    pub fn initial_distribution(&self) -> &[f64] {
        &self.initial
    }

    pub fn is_absorbing(&self, s: usize) -> bool {
        self.absorbing[s]
    }

    pub fn max_stage_steps(&self) -> usize {
        self.max_stage_steps
    }

    pub fn outcomes(&self, s: usize, joint: usize) -> &[Outcome] {
        &self.outcomes[s * self.joint.len() + joint]
    }

    /// Expected reward vector of `(s, joint)`.
    pub fn expected_rewards(&self, s: usize, joint: usize) -> &[f64] {
        let n = self.num_players();
        let base = (s * self.joint.len() + joint) * n;
        &self.expected_rewards[base..base + n]
    }

    /// Largest absolute reward over every outcome.
    pub fn max_abs_reward(&self) -> f64 {
        self.outcomes
            .iter()
            .flatten()
            .flat_map(|o| o.rewards.iter())
            .fold(0.0_f64, |m, r| m.max(r.abs()))
    }

    /// Largest total reward of all players over a single outcome.
    pub fn max_joint_reward(&self) -> f64 {
        self.outcomes
            .iter()
            .flatten()
            .map(|o| o.rewards.iter().sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn joint_index(&self, actions: &JointAction) -> Result<usize> {
        ensure!(
            actions.0.len() == self.num_players(),
            "joint action has {} components for {} players",
            actions.0.len(),
            self.num_players()
        );
        for (i, &a) in actions.0.iter().enumerate() {
            ensure!(a < self.num_actions(i), "action {a} invalid for player {i}");
        }
        Ok(self.joint.encode(&actions.0))
    }

    pub fn sample_initial<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        sample_index(&self.initial, rng)
    }

    /// Samples the next state of `(s, joint)`.
    ///
    /// `steps_taken` counts the steps already played in the current stage; the
    /// result is terminal when the next state is absorbing or the stage budget
    /// is used up.
    pub fn step<R: Rng + ?Sized>(
        &self,
        s: usize,
        joint: usize,
        steps_taken: usize,
        rng: &mut R,
    ) -> Result<StepResult<'_>> {
        ensure!(s < self.num_states, "state {s} out of range");
        ensure!(joint < self.joint.len(), "joint action {joint} out of range");
        let row = self.outcomes(s, joint);
        let outcome = if row.len() == 1 {
            &row[0]
        } else {
            let u: f64 = rng.gen();
            let mut acc = 0.0;
            let mut chosen = &row[row.len() - 1];
            for o in row {
                acc += o.prob;
                if u < acc {
                    chosen = o;
                    break;
                }
            }
            chosen
        };
        let absorbing = self.absorbing[outcome.next];
        Ok(StepResult {
            next: outcome.next,
            rewards: &outcome.rewards,
            absorbing,
            terminal: absorbing || steps_taken + 1 >= self.max_stage_steps,
        })
    }

    /// Stored symmetry for the player permutation `psi`, or the plain
    /// relabelling of players (identity state and action maps) when none is stored.
    pub fn symmetry(&self, psi: &PlayerPermutation) -> Symmetry {
        self.symmetries
            .iter()
            .find(|g| &g.players == psi)
            .cloned()
            .unwrap_or_else(|| {
                Symmetry::identity_maps(psi.clone(), self.num_states, self.num_actions(0))
            })
    }

    pub fn stored_symmetries(&self) -> &[Symmetry] {
        &self.symmetries
    }

    /// Image of a joint action under a symmetry: `(a^g)_{ψ(i)} = φ_A(a_i)`.
    pub fn transport_joint(&self, g: &Symmetry, joint: usize) -> usize {
        let mut out = vec![0; self.num_players()];
        for i in 0..self.num_players() {
            out[g.players.apply(i)] = g.actions[self.joint.component(joint, i)];
        }
        self.joint.encode(&out)
    }

    /// A copy of the game with one outcome's reward replaced; used to build
    /// deliberately asymmetric variants in tests and demos.
    pub fn with_perturbed_reward(
        &self,
        s: usize,
        joint: usize,
        player: usize,
        delta: f64,
    ) -> Result<GameSpec> {
        ensure!(s < self.num_states && joint < self.joint.len(), "index out of range");
        let mut g = self.clone();
        let n = g.num_players();
        let idx = s * g.joint.len() + joint;
        for o in &mut g.outcomes[idx] {
            o.rewards[player] += delta;
        }
        g.expected_rewards[idx * n + player] += delta;
        g.name = format!("{}~perturbed", self.name);
        Ok(g)
    }
}

pub(crate) fn sample_index<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> usize {
    let mut support = probs.iter().enumerate().filter(|(_, &p)| p > 0.0);
    let first = support.next().map(|(i, _)| i).unwrap_or(0);
    if support.next().is_none() {
        return first;
    }
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = first;
    for (i, &p) in probs.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

/// Incremental construction of a validated [`GameSpec`].
#[derive(Clone, Debug)]
pub struct GameBuilder {
    name: String,
    num_states: usize,
    action_labels: Vec<Vec<String>>,
    state_labels: Option<Vec<String>>,
    outcomes: Vec<Vec<Outcome>>,
    initial: Vec<f64>,
    absorbing: Vec<bool>,
    max_stage_steps: usize,
    symmetries: Vec<Symmetry>,
}

impl GameBuilder {
    pub fn new(name: impl Into<String>, num_states: usize, action_labels: Vec<Vec<String>>) -> Self {
        let joint = JointSpace::new(&action_labels.iter().map(Vec::len).collect::<Vec<_>>());
        let mut initial = vec![0.0; num_states];
        if num_states > 0 {
            initial[0] = 1.0;
        }
        Self {
            name: name.into(),
            num_states,
            outcomes: vec![Vec::new(); num_states * joint.len()],
            action_labels,
            state_labels: None,
            initial,
            absorbing: vec![false; num_states],
            max_stage_steps: 1,
            symmetries: Vec::new(),
        }
    }

    pub fn num_joint_actions(&self) -> usize {
        self.action_labels.iter().map(Vec::len).product()
    }

    pub fn outcome(&mut self, s: usize, joint: usize, next: usize, prob: f64, rewards: Vec<f64>) -> &mut Self {
        let j = self.num_joint_actions();
        if let Some(row) = self.outcomes.get_mut(s * j + joint) {
            row.push(Outcome { next, prob, rewards });
        } else {
            // Out-of-range indices are reported by `build`.
            self.outcomes.push(vec![Outcome {
                next: usize::MAX,
                prob,
                rewards,
            }]);
        }
        self
    }

    pub fn initial(&mut self, dist: Vec<f64>) -> &mut Self {
        self.initial = dist;
        self
    }

    pub fn absorbing(&mut self, s: usize) -> &mut Self {
        if let Some(a) = self.absorbing.get_mut(s) {
            *a = true;
        }
        self
    }

    pub fn max_stage_steps(&mut self, steps: usize) -> &mut Self {
        self.max_stage_steps = steps;
        self
    }

    pub fn state_labels(&mut self, labels: Vec<String>) -> &mut Self {
        self.state_labels = Some(labels);
        self
    }

    pub fn symmetry(&mut self, g: Symmetry) -> &mut Self {
        self.symmetries.push(g);
        self
    }

    pub fn build(self) -> Result<GameSpec> {
        let n = self.action_labels.len();
        if n < 2 {
            return Err(validation("players", format!("need at least 2 players, got {n}")));
        }
        for (i, labels) in self.action_labels.iter().enumerate() {
            if labels.is_empty() {
                return Err(validation("actions", format!("player {i} has no actions")));
            }
        }
        if self.num_states == 0 {
            return Err(validation("states", "need at least one state"));
        }
        if self.max_stage_steps == 0 {
            return Err(validation("max_stage_steps", "must be at least 1"));
        }
        let joint = JointSpace::new(&self.action_labels.iter().map(Vec::len).collect::<Vec<_>>());
        let nj = joint.len();
        if self.outcomes.len() != self.num_states * nj {
            return Err(validation("transition", "state or joint-action index out of range"));
        }

        let mut outcomes = self.outcomes;
        for s in 0..self.num_states {
            for a in 0..nj {
                let row = &mut outcomes[s * nj + a];
                if row.is_empty() && self.absorbing[s] {
                    row.push(Outcome {
                        next: s,
                        prob: 1.0,
                        rewards: vec![0.0; n],
                    });
                }
                *row = merge_outcomes(std::mem::take(row), s, a)?;
                if row.is_empty() {
                    return Err(validation(
                        "transition",
                        format!("state {s}, joint action {a} has no outcomes"),
                    ));
                }
                let mut total = 0.0;
                for o in row.iter() {
                    if o.next >= self.num_states {
                        return Err(validation("transition", format!("next state {} out of range", o.next)));
                    }
                    if !(o.prob >= 0.0) {
                        return Err(validation("transition", format!("negative probability at state {s}")));
                    }
                    if o.rewards.len() != n {
                        return Err(validation(
                            "reward",
                            format!("state {s}, joint {a}: {} rewards for {n} players", o.rewards.len()),
                        ));
                    }
                    if o.rewards.iter().any(|r| !r.is_finite()) {
                        return Err(validation("reward", format!("non-finite reward at state {s}")));
                    }
                    total += o.prob;
                }
                if (total - 1.0).abs() > PROB_TOLERANCE {
                    return Err(validation(
                        "transition",
                        format!("state {s}, joint action {a}: probabilities sum to {total}"),
                    ));
                }
            }
        }

        if self.initial.len() != self.num_states
            || self.initial.iter().any(|&p| !(p >= 0.0))
            || (self.initial.iter().sum::<f64>() - 1.0).abs() > PROB_TOLERANCE
        {
            return Err(validation("initial", "must be a probability vector over states"));
        }

        let mut expected_rewards = vec![0.0; self.num_states * nj * n];
        for (idx, row) in outcomes.iter().enumerate() {
            for o in row {
                for i in 0..n {
                    expected_rewards[idx * n + i] += o.prob * o.rewards[i];
                }
            }
        }

        let state_labels = match self.state_labels {
            Some(l) if l.len() == self.num_states => l,
            Some(_) => return Err(validation("state_labels", "one label per state required")),
            None => (0..self.num_states).map(|s| format!("s{s}")).collect(),
        };

        let game = GameSpec {
            name: self.name,
            num_states: self.num_states,
            action_labels: self.action_labels,
            state_labels,
            joint,
            outcomes,
            expected_rewards,
            initial: self.initial,
            absorbing: self.absorbing,
            max_stage_steps: self.max_stage_steps,
            symmetries: Vec::new(),
        };
        let mut game = game;
        for g in &self.symmetries {
            validate_symmetry(&game, g)?;
        }
        game.symmetries = self.symmetries;
        Ok(game)
    }
}

fn merge_outcomes(row: Vec<Outcome>, s: usize, a: usize) -> Result<Vec<Outcome>> {
    let mut merged: Vec<Outcome> = Vec::with_capacity(row.len());
    for o in row {
        if let Some(m) = merged.iter_mut().find(|m| m.next == o.next) {
            if m.rewards != o.rewards {
                return Err(validation(
                    "reward",
                    format!("state {s}, joint {a}: two reward vectors for next state {}", o.next),
                ));
            }
            m.prob += o.prob;
        } else {
            merged.push(o);
        }
    }
    merged.retain(|o| o.prob > 0.0);
    Ok(merged)
}

fn validate_symmetry(game: &GameSpec, g: &Symmetry) -> Result<()> {
    let n = game.num_players();
    let field = "symmetry";
    if g.players.len() != n {
        return Err(validation(field, "player permutation has the wrong length"));
    }
    if !is_bijection(&g.states, game.num_states) {
        return Err(validation(field, "state map is not a bijection"));
    }
    let na = game.num_actions(0);
    if (0..n).any(|i| game.num_actions(i) != na) || !is_bijection(&g.actions, na) {
        return Err(validation(field, "action map must be a bijection over a shared action set"));
    }
    for s in 0..game.num_states {
        let gs = g.states[s];
        if game.absorbing[s] != game.absorbing[gs] {
            return Err(validation(field, format!("absorbing flag not preserved at state {s}")));
        }
        if (game.initial[s] - game.initial[gs]).abs() > PROB_TOLERANCE {
            return Err(validation(field, format!("initial distribution not preserved at state {s}")));
        }
        for a in 0..game.num_joint_actions() {
            let ga = game.transport_joint(g, a);
            let image = game.outcomes(gs, ga);
            for o in game.outcomes(s, a) {
                let target = g.states[o.next];
                let Some(m) = image.iter().find(|m| m.next == target) else {
                    return Err(validation(field, format!("transition from state {s} not preserved")));
                };
                if (m.prob - o.prob).abs() > PROB_TOLERANCE {
                    return Err(validation(field, format!("probability from state {s} not preserved")));
                }
                for i in 0..n {
                    if (m.rewards[g.players.apply(i)] - o.rewards[i]).abs() > PROB_TOLERANCE {
                        return Err(validation(field, format!("reward of player {i} at state {s} not preserved")));
                    }
                }
            }
        }
    }
    Ok(())
}

fn is_bijection(map: &[usize], n: usize) -> bool {
    if map.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    map.iter().all(|&m| m < n && !std::mem::replace(&mut seen[m], true))
}

pub(crate) fn labels(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn coin_game() -> GameBuilder {
        let mut b = GameBuilder::new("coin", 3, vec![labels(&["a"]), labels(&["a"])]);
        b.outcome(0, 0, 1, 0.5, vec![1.0, 0.0])
            .outcome(0, 0, 2, 0.5, vec![0.0, 1.0])
            .absorbing(1)
            .absorbing(2)
            .max_stage_steps(5);
        b
    }

    #[test]
    fn builds_and_fills_absorbing_rows() {
        let g = coin_game().build().unwrap();
        assert_eq!(g.outcomes(1, 0)[0].next, 1);
        assert_eq!(g.expected_rewards(0, 0), &[0.5, 0.5]);
    }

    #[test]
    fn rejects_unnormalized_rows() {
        let mut b = GameBuilder::new("bad", 1, vec![labels(&["a"]), labels(&["a"])]);
        b.outcome(0, 0, 0, 0.7, vec![0.0, 0.0]);
        assert!(matches!(b.build(), Err(Error::Validation { .. })));
    }

    #[test]
    fn rejects_empty_action_set() {
        let b = GameBuilder::new("bad", 1, vec![labels(&["a"]), vec![]]);
        assert!(b.build().is_err());
    }

    #[test]
    fn rejects_broken_symmetry() {
        let mut b = coin_game();
        b.symmetry(Symmetry::identity_maps(PlayerPermutation::new(vec![1, 0]).unwrap(), 3, 1));
        assert!(b.build().is_err());
        let mut b = coin_game();
        b.symmetry(Symmetry {
            players: PlayerPermutation::new(vec![1, 0]).unwrap(),
            states: vec![0, 2, 1],
            actions: vec![0],
        });
        assert!(b.build().is_ok());
    }

    #[test]
    fn step_rejects_bad_indices() {
        let g = coin_game().build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(g.step(3, 0, 0, &mut rng).is_err());
        assert!(g.step(0, 1, 0, &mut rng).is_err());
    }

    #[test]
    fn deterministic_row_always_lands_on_target() {
        let mut b = GameBuilder::new("det", 2, vec![labels(&["a", "b"]), labels(&["a"])]);
        b.outcome(0, 0, 1, 1.0, vec![0.0, 0.0])
            .outcome(0, 1, 0, 1.0, vec![0.0, 0.0])
            .absorbing(1);
        let g = b.build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            assert_eq!(g.step(0, 0, 0, &mut rng).unwrap().next, 1);
        }
    }
}
