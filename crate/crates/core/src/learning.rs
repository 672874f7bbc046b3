//! Tabular Q-functions, visit-count learning rates, the shared exploration
//! process and the temporal-difference updates used by every learner.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Error, Result};
use crate::game::{JointAction, JointSpace};
use crate::solver::{argmax, MatrixSolution, MatrixSolver};

/// What a table estimates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableRole {
    /// Sum of all players' rewards.
    Cooperative,
    /// Player `j`'s value while the rest of the team minimises it.
    Retaliation(usize),
    /// Player `j`'s value when best-responding to the cooperative profile.
    Defection(usize),
    /// A selfish learner's own-action values.
    Selfish(usize),
}

/// Dense `state x column` table; columns are joint actions, or own actions
/// for selfish tables.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable {
    role: TableRole,
    num_states: usize,
    cols: usize,
    values: Vec<f64>,
}

impl QTable {
    pub fn new(role: TableRole, num_states: usize, cols: usize) -> Self {
        Self::filled(role, num_states, cols, 0.0)
    }

    pub fn filled(role: TableRole, num_states: usize, cols: usize, value: f64) -> Self {
        Self {
            role,
            num_states,
            cols,
            values: vec![value; num_states * cols],
        }
    }

    pub fn role(&self) -> TableRole {
        self.role
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.values[s * self.cols + a]
    }

    pub fn set(&mut self, s: usize, a: usize, v: f64) {
        self.values[s * self.cols + a] = v;
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.values[s * self.cols..(s + 1) * self.cols]
    }

    pub fn max(&self, s: usize) -> f64 {
        self.row(s).iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Greedy column, lowest index on ties.
    pub fn argmax(&self, s: usize) -> usize {
        argmax(self.row(s))
    }

    pub fn max_abs_diff(&self, other: &QTable) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// One `state column value` line per entry.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for s in 0..self.num_states {
            for a in 0..self.cols {
                let _ = writeln!(out, "{s} {a} {}", self.get(s, a));
            }
        }
        out
    }

    /// Reads [`QTable::to_text`] output into a table of the given shape.
    pub fn from_text(role: TableRole, num_states: usize, cols: usize, text: &str) -> Result<Self> {
        let mut q = Self::new(role, num_states, cols);
        for (i, line) in text.lines().enumerate() {
            let w: Vec<&str> = line.split_whitespace().collect();
            if w.is_empty() {
                continue;
            }
            let bad = |msg: &str| Error::Parse {
                line: i + 1,
                msg: msg.to_string(),
            };
            if w.len() != 3 {
                return Err(bad("expected `state column value`"));
            }
            let s: usize = w[0].parse().map_err(|_| bad("bad state"))?;
            let a: usize = w[1].parse().map_err(|_| bad("bad column"))?;
            let v: f64 = w[2].parse().map_err(|_| bad("bad value"))?;
            if s >= num_states || a >= cols || !v.is_finite() {
                return Err(bad("entry out of range"));
            }
            q.set(s, a, v);
        }
        Ok(q)
    }
}

/// Sum-maximising joint action of `q` at `s`, lowest joint index on ties.
pub fn greedy_joint_argmax(q: &QTable, js: &JointSpace, s: usize) -> JointAction {
    js.decode(q.argmax(s))
}

/// Whether learning rates count visits per state or per (state, column).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RateKey {
    State,
    #[default]
    StateAction,
}

/// Visit counts backing the `1 / n` learning rate.
#[derive(Clone, Debug, PartialEq)]
pub struct VisitCounter {
    key: RateKey,
    cols: usize,
    counts: Vec<u64>,
}

impl VisitCounter {
    pub fn new(key: RateKey, num_states: usize, cols: usize) -> Self {
        let len = match key {
            RateKey::State => num_states,
            RateKey::StateAction => num_states * cols,
        };
        Self {
            key,
            cols,
            counts: vec![0; len],
        }
    }

    fn slot(&self, s: usize, a: usize) -> usize {
        match self.key {
            RateKey::State => s,
            RateKey::StateAction => s * self.cols + a,
        }
    }

    /// Records a visit and returns the learning rate for it.
    pub fn visit(&mut self, s: usize, a: usize) -> f64 {
        let k = self.slot(s, a);
        self.counts[k] += 1;
        1.0 / self.counts[k] as f64
    }

    pub fn count(&self, s: usize, a: usize) -> u64 {
        self.counts[self.slot(s, a)]
    }

    /// `1 / visits`, counting the current visit.
    pub fn rate(&self, s: usize, a: usize) -> Result<f64> {
        let n = self.count(s, a);
        ensure!(n > 0, "learning rate requested for an unvisited entry");
        Ok(1.0 / n as f64)
    }
}

/// Learning rate for state `s` after its visits were counted.
pub fn visit_learning_rate(counter: &VisitCounter, s: usize) -> Result<f64> {
    counter.rate(s, 0)
}

/// Seeded decaying exploration: step `t` explores iff `X_t < ε·d^t`, with
/// `X_t` the `t`-th uniform draw of the stream. Two processes with the same
/// parameters make the same decisions and the same follow-up draws.
#[derive(Clone, Debug)]
pub struct ExplorationProcess {
    epsilon: f64,
    decay: f64,
    seed: u64,
    t: u64,
    rng: ChaCha8Rng,
}

impl ExplorationProcess {
    pub fn new(epsilon: f64, decay: f64, seed: u64) -> Result<Self> {
        ensure!((0.0..=1.0).contains(&epsilon), "epsilon must be in [0, 1]");
        ensure!(decay > 0.0 && decay <= 1.0, "decay must be in (0, 1]");
        Ok(Self {
            epsilon,
            decay,
            seed,
            t: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn counter(&self) -> u64 {
        self.t
    }

    pub fn threshold(&self, t: u64) -> f64 {
        self.epsilon * self.decay.powf(t as f64)
    }

    /// Draws `X_t` and advances the clock; `t` must equal the internal counter.
    pub fn explore_now(&mut self, t: u64) -> Result<bool> {
        ensure!(t == self.t, "exploration step {t} requested, clock at {}", self.t);
        let x: f64 = self.rng.gen();
        self.t += 1;
        Ok(x < self.threshold(t))
    }

    /// Uniform action from the same stream.
    pub fn uniform_action(&mut self, n: usize) -> usize {
        self.rng.gen_range(0..n)
    }
}

/// Discount factor and the bonus added to the retaliation count.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LearningParams {
    pub gamma: f64,
    pub retaliation_bonus: u32,
}

impl Default for LearningParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            retaliation_bonus: 1,
        }
    }
}

impl LearningParams {
    pub fn new(gamma: f64, retaliation_bonus: u32) -> Result<Self> {
        ensure!((0.0..=1.0).contains(&gamma), "gamma must be in [0, 1]");
        Ok(Self {
            gamma,
            retaliation_bonus,
        })
    }
}

/// `Q(s, a) ← (1 - α) Q(s, a) + α · target`.
pub fn td_update(q: &mut QTable, s: usize, a: usize, target: f64, alpha: f64) {
    let old = q.get(s, a);
    q.set(s, a, old + alpha * (target - old));
}

/// What a learner needs to know about one step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Step {
    pub state: usize,
    pub col: usize,
    pub reward: f64,
    pub next_state: usize,
    /// No bootstrap beyond this step.
    pub terminal: bool,
}

impl Step {
    fn target(&self, gamma: f64, next_value: impl FnOnce() -> f64) -> f64 {
        if self.terminal {
            self.reward
        } else {
            self.reward + gamma * next_value()
        }
    }
}

/// Independent Q-learning update on own actions.
pub fn q_update_selfish(q: &mut QTable, step: &Step, alpha: f64, gamma: f64) {
    let target = step.target(gamma, || q.max(step.next_state));
    td_update(q, step.state, step.col, target, alpha);
}

/// Joint-action update on the sum of rewards (`step.reward` carries the sum).
pub fn q_update_cooperative(qc: &mut QTable, step: &Step, alpha: f64, gamma: f64) {
    let target = step.target(gamma, || qc.max(step.next_state));
    td_update(qc, step.state, step.col, target, alpha);
}

/// The `focal` player's zero-sum matrix at `s`: rows are its actions, columns
/// the joint actions of everybody else.
pub fn focal_matrix(q: &QTable, js: &JointSpace, focal: usize, s: usize, out: &mut Vec<f64>) -> (usize, usize) {
    let rows = js.sizes()[focal];
    let cols = js.len() / rows;
    out.clear();
    for a in 0..rows {
        for t in 0..cols {
            out.push(q.get(s, js.join(focal, a, t)));
        }
    }
    (rows, cols)
}

/// Max over the focal player's mixed strategies of the min over the others'
/// joint actions, with both optimal strategies.
pub fn minimax_solution(
    q: &QTable,
    js: &JointSpace,
    focal: usize,
    s: usize,
    solver: &mut MatrixSolver,
) -> Result<MatrixSolution> {
    let mut buf = Vec::with_capacity(js.len());
    let (rows, cols) = focal_matrix(q, js, focal, s, &mut buf);
    solver.solve(rows, cols, &buf)
}

/// Minimax-Q update for `focal`; `step.reward` is the focal player's reward.
pub fn q_update_minimax(
    q: &mut QTable,
    js: &JointSpace,
    focal: usize,
    step: &Step,
    alpha: f64,
    gamma: f64,
    solver: &mut MatrixSolver,
) -> Result<()> {
    let next = if step.terminal {
        0.0
    } else {
        minimax_solution(q, js, focal, step.next_state, solver)?.value
    };
    let target = step.reward + gamma * next;
    td_update(q, step.state, step.col, target, alpha);
    Ok(())
}

/// Retaliation update for target `j`: the minimax update with `j` as focal
/// player and `j`'s reward.
pub fn q_update_retaliation(
    qr: &mut QTable,
    js: &JointSpace,
    j: usize,
    step: &Step,
    alpha: f64,
    gamma: f64,
    solver: &mut MatrixSolver,
) -> Result<()> {
    q_update_minimax(qr, js, j, step, alpha, gamma, solver)
}

/// `V^d_j(s)`: best value of `j` when everyone else plays their component of
/// the cooperative joint action `coop`.
pub fn defection_value(qd: &QTable, js: &JointSpace, j: usize, s: usize, coop: usize) -> f64 {
    (0..js.sizes()[j])
        .map(|a| qd.get(s, js.with_component(coop, j, a)))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Defection update for `j`; `coop_next` is the cooperative joint action the
/// others will follow at the next state.
pub fn q_update_defection(
    qd: &mut QTable,
    js: &JointSpace,
    j: usize,
    step: &Step,
    coop_next: usize,
    alpha: f64,
    gamma: f64,
) {
    let target = step.target(gamma, || defection_value(qd, js, j, step.next_state, coop_next));
    td_update(qd, step.state, step.col, target, alpha);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn step(reward: f64, terminal: bool) -> Step {
        Step {
            state: 0,
            col: 0,
            reward,
            next_state: 0,
            terminal,
        }
    }

    #[test]
    fn learning_rate_counts_visits() {
        let mut c = VisitCounter::new(RateKey::State, 2, 3);
        assert!(visit_learning_rate(&c, 0).is_err());
        assert_eq!(c.visit(0, 1), 1.0);
        c.visit(0, 2);
        c.visit(0, 0);
        assert_eq!(c.visit(0, 1), 0.25);
        assert_eq!(visit_learning_rate(&c, 0).unwrap(), 0.25);
        let mut c = VisitCounter::new(RateKey::StateAction, 2, 3);
        c.visit(1, 2);
        assert_eq!(c.visit(1, 1), 1.0);
    }

    #[test]
    fn selfish_contracts_to_reward() {
        let mut q = QTable::new(TableRole::Selfish(0), 1, 1);
        q_update_selfish(&mut q, &step(5.0, false), 1.0, 0.0);
        assert_eq!(q.get(0, 0), 5.0);
        q_update_selfish(&mut q, &step(9.0, false), 0.0, 0.0);
        assert_eq!(q.get(0, 0), 5.0);
    }

    #[test]
    fn selfish_geometric_fixed_point() {
        let mut q = QTable::new(TableRole::Selfish(0), 1, 1);
        for _ in 0..200 {
            q_update_selfish(&mut q, &step(1.0, false), 0.5, 0.5);
        }
        assert!((q.get(0, 0) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn cooperative_terminal_is_reward_sum() {
        let mut q = QTable::new(TableRole::Cooperative, 1, 4);
        q.set(0, 0, 50.0);
        let mut s = step(7.0, true);
        s.col = 1;
        q_update_cooperative(&mut q, &s, 1.0, 1.0);
        assert_eq!(q.get(0, 1), 7.0);
    }

    #[test]
    fn minimax_bootstrap_of_payoff_matrix() {
        // IPD row-player payoffs as the table at the next state.
        let js = JointSpace::new(&[2, 2]);
        let mut q = QTable::new(TableRole::Retaliation(0), 2, 4);
        for (a, v) in [-1.0, -3.0, 0.0, -2.0].into_iter().enumerate() {
            q.set(1, a, v);
        }
        let mut solver = MatrixSolver::default();
        let s = Step {
            state: 0,
            col: 0,
            reward: 0.0,
            next_state: 1,
            terminal: false,
        };
        q_update_minimax(&mut q, &js, 0, &s, 1.0, 1.0, &mut solver).unwrap();
        assert!((q.get(0, 0) + 2.0).abs() < 1e-12);
    }

    #[test]
    fn defection_value_scans_own_actions() {
        let js = JointSpace::new(&[2, 2]);
        let mut qd = QTable::new(TableRole::Defection(1), 1, 4);
        // Player 1's IPD payoffs.
        for (a, v) in [-1.0, 0.0, -3.0, -2.0].into_iter().enumerate() {
            qd.set(0, a, v);
        }
        assert_eq!(defection_value(&qd, &js, 1, 0, 0), 0.0);
    }

    #[test]
    fn exploration_extremes() {
        let mut never = ExplorationProcess::new(0.0, 0.9, 1).unwrap();
        let mut always = ExplorationProcess::new(1.0, 1.0, 1).unwrap();
        for t in 0..1000 {
            assert!(!never.explore_now(t).unwrap());
            assert!(always.explore_now(t).unwrap());
        }
        assert!(never.explore_now(5).is_err());
    }

    #[test]
    fn exploration_frequency_follows_threshold() {
        let d: f64 = 0.995;
        let mut hits = 0.0;
        let mut mean = 0.0;
        let mut var = 0.0;
        for seed in 0..20 {
            let mut p = ExplorationProcess::new(1.0, d, seed).unwrap();
            for t in 0..1000 {
                let q = d.powi(t as i32);
                mean += q;
                var += q * (1.0 - q);
                if p.explore_now(t).unwrap() {
                    hits += 1.0;
                }
            }
        }
        assert!((hits - mean).abs() < 4.0 * var.sqrt(), "{hits} vs {mean}");
    }

    #[test]
    fn table_text_roundtrip() {
        let mut q = QTable::new(TableRole::Cooperative, 2, 3);
        q.set(1, 2, -0.1);
        q.set(0, 1, 1e-17);
        let back = QTable::from_text(TableRole::Cooperative, 2, 3, &q.to_text()).unwrap();
        assert_eq!(back, q);
        assert!(QTable::from_text(TableRole::Cooperative, 2, 3, "5 0 1").is_err());
    }
}
