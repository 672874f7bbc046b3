//! Selfish opponents: independent Q-learning, tabular softmax policy
//! gradient with Adam, and scripted fixed-action players.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Result};
use crate::game::{Agent, GameSpec, Observation, StageRecord, Transition};
use crate::learning::{q_update_selfish, ExplorationProcess, QTable, RateKey, Step, TableRole, VisitCounter};

/// Q-learner over its own actions; opponents are part of the environment.
pub struct SelfishQAgent {
    seat: usize,
    q: QTable,
    counter: VisitCounter,
    explorer: ExplorationProcess,
    gamma: f64,
}

impl SelfishQAgent {
    pub fn new(game: &GameSpec, seat: usize, epsilon: f64, decay: f64, seed: u64, gamma: f64, rate_key: RateKey) -> Result<Self> {
        ensure!(seat < game.num_players(), "seat {seat} out of range");
        let na = game.num_actions(seat);
        Ok(Self {
            seat,
            q: QTable::new(TableRole::Selfish(seat), game.num_states(), na),
            counter: VisitCounter::new(rate_key, game.num_states(), na),
            explorer: ExplorationProcess::new(epsilon, decay, seed)?,
            gamma,
        })
    }

    pub fn q(&self) -> &QTable {
        &self.q
    }
}

impl Agent for SelfishQAgent {
    fn name(&self) -> &str {
        "qlearning"
    }

    fn act(&mut self, obs: &Observation) -> usize {
        let explore = self
            .explorer
            .explore_now(obs.step)
            .expect("exploration clock must follow the global step counter");
        if explore {
            self.explorer.uniform_action(self.q.cols())
        } else {
            self.q.argmax(obs.state)
        }
    }

    fn observe(&mut self, tr: &Transition) {
        let a = tr.actions[self.seat];
        let alpha = self.counter.visit(tr.state, a);
        let step = Step {
            state: tr.state,
            col: a,
            reward: tr.rewards[self.seat],
            next_state: tr.next_state,
            terminal: tr.stage_end,
        };
        q_update_selfish(&mut self.q, &step, alpha, self.gamma);
    }
}

/// Adam moment estimates for a flat parameter vector.
#[derive(Clone, Debug)]
pub struct Adam {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(len: usize, lr: f64) -> Self {
        Self {
            lr,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    /// Gradient ascent step.
    pub fn ascend(&mut self, params: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let c1 = 1.0 - self.beta1.powi(self.t);
        let c2 = 1.0 - self.beta2.powi(self.t);
        for k in 0..params.len() {
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * grad[k];
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * grad[k] * grad[k];
            params[k] += self.lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + self.eps);
        }
    }
}

pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let m = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = logits.iter().map(|x| (x - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|x| x / z).collect()
}

/// `(state, own action, own reward)` for each step of a stage.
pub type Episode = [(usize, usize, f64)];

/// REINFORCE estimate `Σ_k G_k ∇ log π(a_k | s_k)` with return-to-go `G_k`,
/// for logits stored row-major `[state][action]`.
pub fn reinforce_gradient(logits: &[f64], num_actions: usize, episode: &Episode, gamma: f64) -> Vec<f64> {
    let mut grad = vec![0.0; logits.len()];
    let mut g = 0.0;
    for &(s, a, r) in episode.iter().rev() {
        g = r + gamma * g;
        let row = s * num_actions..(s + 1) * num_actions;
        let p = softmax(&logits[row.clone()]);
        for (k, pk) in p.iter().enumerate() {
            let indicator = if k == a { 1.0 } else { 0.0 };
            grad[row.start + k] += g * (indicator - pk);
        }
    }
    grad
}

/// Surrogate `Σ_k G_k log π(a_k | s_k)` whose gradient is [`reinforce_gradient`].
pub fn reinforce_surrogate(logits: &[f64], num_actions: usize, episode: &Episode, gamma: f64) -> f64 {
    let mut g = 0.0;
    let mut total = 0.0;
    for &(s, a, r) in episode.iter().rev() {
        g = r + gamma * g;
        let p = softmax(&logits[s * num_actions..(s + 1) * num_actions]);
        total += g * p[a].ln();
    }
    total
}

/// Tabular softmax policy trained by REINFORCE and Adam after every stage.
pub struct PgAgent {
    seat: usize,
    num_actions: usize,
    logits: Vec<f64>,
    adam: Adam,
    gamma: f64,
    rng: ChaCha8Rng,
    episode: Vec<(usize, usize, f64)>,
}

impl PgAgent {
    pub fn new(game: &GameSpec, seat: usize, lr: f64, seed: u64, gamma: f64) -> Result<Self> {
        ensure!(seat < game.num_players(), "seat {seat} out of range");
        let na = game.num_actions(seat);
        let len = game.num_states() * na;
        Ok(Self {
            seat,
            num_actions: na,
            logits: vec![0.0; len],
            adam: Adam::new(len, lr),
            gamma,
            rng: ChaCha8Rng::seed_from_u64(seed),
            episode: Vec::new(),
        })
    }

    pub fn policy(&self, s: usize) -> Vec<f64> {
        softmax(&self.logits[s * self.num_actions..(s + 1) * self.num_actions])
    }
}

impl Agent for PgAgent {
    fn name(&self) -> &str {
        "pg"
    }

    fn act(&mut self, obs: &Observation) -> usize {
        let p = self.policy(obs.state);
        let u: f64 = self.rng.gen();
        let mut acc = 0.0;
        for (a, pa) in p.iter().enumerate() {
            acc += pa;
            if u < acc {
                return a;
            }
        }
        p.len() - 1
    }

    fn observe(&mut self, tr: &Transition) {
        self.episode.push((tr.state, tr.actions[self.seat], tr.rewards[self.seat]));
    }

    fn end_stage(&mut self, _record: &StageRecord) {
        let grad = reinforce_gradient(&self.logits, self.num_actions, &self.episode, self.gamma);
        self.adam.ascend(&mut self.logits, &grad);
        self.episode.clear();
    }
}

/// Plays the same action forever.
pub struct FixedAgent {
    action: usize,
    name: String,
}

impl FixedAgent {
    pub fn new(game: &GameSpec, seat: usize, action: usize, name: impl Into<String>) -> Result<Self> {
        ensure!(seat < game.num_players(), "seat {seat} out of range");
        ensure!(action < game.num_actions(seat), "action {action} invalid for seat {seat}");
        Ok(Self {
            action,
            name: name.into(),
        })
    }
}

impl Agent for FixedAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn act(&mut self, _obs: &Observation) -> usize {
        self.action
    }

    fn observe(&mut self, _tr: &Transition) {}
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn zero_logits_are_uniform() {
        assert_eq!(softmax(&[0.0, 0.0, 0.0, 0.0]), vec![0.25; 4]);
    }

    #[test]
    fn bandit_converges_to_better_arm() {
        let mut logits = vec![0.0, 0.0];
        let mut adam = Adam::new(2, 0.1);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let p = softmax(&logits);
            let a = if rng.gen::<f64>() < p[0] { 0 } else { 1 };
            let r = if a == 0 { 1.0 } else { 0.0 };
            let g = reinforce_gradient(&logits, 2, &[(0, a, r)], 1.0);
            adam.ascend(&mut logits, &g);
        }
        assert!(softmax(&logits)[0] > 0.99);
    }

    proptest! {
        #[test]
        fn gradient_matches_finite_differences(
            logits in prop::collection::vec(-2.0f64..2.0, 6),
            steps in prop::collection::vec((0usize..2, 0usize..3, -5.0f64..5.0), 1..6),
            gamma in 0.5f64..1.0,
        ) {
            let g = reinforce_gradient(&logits, 3, &steps, gamma);
            let h = 1e-5;
            for k in 0..logits.len() {
                let mut up = logits.clone();
                let mut down = logits.clone();
                up[k] += h;
                down[k] -= h;
                let fd = (reinforce_surrogate(&up, 3, &steps, gamma) - reinforce_surrogate(&down, 3, &steps, gamma)) / (2.0 * h);
                let scale = g[k].abs().max(fd.abs()).max(1.0);
                prop_assert!((g[k] - fd).abs() / scale < 1e-5, "{} vs {}", g[k], fd);
            }
        }

        #[test]
        fn policy_stays_a_distribution(grads in prop::collection::vec(prop::collection::vec(-100.0f64..100.0, 3), 1..20)) {
            let mut logits = vec![0.0; 3];
            let mut adam = Adam::new(3, 0.1);
            for g in grads {
                adam.ascend(&mut logits, &g);
                let p = softmax(&logits);
                prop_assert!(p.iter().all(|&x| (0.0..=1.0).contains(&x)));
                prop_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
            }
        }
    }
}
