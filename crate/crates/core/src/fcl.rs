//! Foolproof cooperative learning.
//!
//! Every FCL player learns, from the full transitions it observes, a
//! sum-of-rewards table `Q^c` and for each other player `j` a retaliation
//! table `Q^r_j` (j's value while the team minimises it) and a defection table
//! `Q^d_j` (j's value when best-responding to the cooperative profile).
//!
//! The team cooperates by cycling the sum-maximising profile through the
//! relabellings `σ^t`, explores jointly through a shared seeded process, and
//! when a player leaves the agreed profile outside an exploration step, plays
//! the minimax punishment against it for enough stages to make the deviation
//! unprofitable.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Result};
use crate::game::{
    cyclic_permutation, sample_index, Agent, GameSpec, JointAction, JointSpace, Observation,
    PlayerPermutation, StageRecord, Symmetry, Transition,
};
use crate::learning::{
    defection_value, q_update_cooperative, q_update_defection, td_update, ExplorationProcess,
    LearningParams, QTable, RateKey, Step, TableRole, VisitCounter,
};
use crate::solver::{MatrixSolution, MatrixSolver};

/// Below this gap between `V^c` and `V^r` no finite punishment suffices.
pub const UNBOUNDED_GAP: f64 = 1e-6;

/// Number of punishment stages.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RetaliationCount {
    Finite(u64),
    Unbounded,
}

impl std::fmt::Display for RetaliationCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RetaliationCount::Finite(k) => write!(f, "{k}"),
            RetaliationCount::Unbounded => f.write_str("UNBOUNDED"),
        }
    }
}

/// Smallest number of punishment stages that makes defecting no better than
/// cooperating: `max(0, ⌈(vd - vc) / (vc - vr)⌉) + bonus`.
pub fn retaliation_count(vd: f64, vc: f64, vr: f64, bonus: u32) -> Result<RetaliationCount> {
    ensure!(vc >= vr - 1e-9, "cooperative value {vc} below retaliation value {vr}");
    let gap = vc - vr;
    if gap <= UNBOUNDED_GAP {
        return Ok(RetaliationCount::Unbounded);
    }
    // Trim float noise so that an exact integer ratio is not rounded up.
    let ratio = (vd - vc) / gap;
    let k = (ratio - 1e-9).ceil().max(0.0);
    Ok(RetaliationCount::Finite(k as u64 + u64::from(bonus)))
}

/// Player `i` plays role `σ^t(i)` of the cooperative joint action.
pub fn egalitarian_schedule(sigma: &PlayerPermutation, t: u64, coop: &JointAction) -> JointAction {
    let psi = sigma.pow(t);
    JointAction((0..coop.0.len()).map(|i| coop.0[psi.apply(i)]).collect())
}

/// A punished deviation.
#[derive(Clone, Debug, PartialEq)]
pub struct DefectionEvent {
    pub defector: usize,
    pub stage: u64,
    pub step: u64,
    pub state: usize,
    pub expected: usize,
    pub played: usize,
    pub count: RetaliationCount,
}

/// Players whose action differs from the expectation; `None` entries are not
/// monitored and nothing is flagged during exploration steps.
pub fn detect_defection(expected: &[Option<usize>], played: &[usize], exploring: bool) -> Vec<usize> {
    if exploring {
        return Vec::new();
    }
    expected
        .iter()
        .zip(played)
        .enumerate()
        .filter(|(_, (e, p))| e.is_some_and(|e| e != **p))
        .map(|(j, _)| j)
        .collect()
}

#[derive(Clone, Debug)]
pub struct FclConfig {
    pub epsilon: f64,
    pub decay: f64,
    /// Shared by every FCL player of the team.
    pub team_seed: u64,
    pub params: LearningParams,
    pub rate_key: RateKey,
    /// N-cyclic permutation driving the schedule; the rotation by default.
    pub sigma: Option<PlayerPermutation>,
}

impl Default for FclConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.5,
            decay: 0.9,
            team_seed: 0,
            params: LearningParams::default(),
            rate_key: RateKey::StateAction,
            sigma: None,
        }
    }
}

#[derive(Clone, Debug)]
struct Retaliation {
    target: usize,
    required: RetaliationCount,
    served: u64,
    /// Still inside the stage where the defection happened.
    in_defection_stage: bool,
}

/// One FCL player.
pub struct FclAgent {
    game: Arc<GameSpec>,
    seat: usize,
    js: JointSpace,
    params: LearningParams,
    qc: QTable,
    qr: Vec<Option<QTable>>,
    qd: Vec<Option<QTable>>,
    counter: VisitCounter,
    explorer: ExplorationProcess,
    team_rng: ChaCha8Rng,
    sigma: PlayerPermutation,
    /// Symmetry for `σ^k`, `k` in one period.
    cycle: Vec<(Symmetry, Vec<usize>)>,
    stage: u64,
    retaliation: Option<Retaliation>,
    solver: MatrixSolver,
    minimax_cache: Vec<Vec<Option<MatrixSolution>>>,
    expected: Vec<Option<usize>>,
    exploring: bool,
    explore_draw: Vec<usize>,
    log: Vec<DefectionEvent>,
    initial_state: usize,
    name: String,
}

impl FclAgent {
    pub fn new(game: Arc<GameSpec>, seat: usize, config: &FclConfig) -> Result<Self> {
        let n = game.num_players();
        ensure!(seat < n, "seat {seat} out of range");
        let sigma = match &config.sigma {
            Some(s) => s.clone(),
            None => cyclic_permutation(n)?,
        };
        ensure!(sigma.len() == n && sigma.is_n_cyclic(), "schedule permutation must be N-cyclic");
        let js = game.joint().clone();
        let (ns, nj) = (game.num_states(), js.len());
        let per_opponent = |role: fn(usize) -> TableRole, init: f64| {
            (0..n)
                .map(|j| (j != seat).then(|| QTable::filled(role(j), ns, nj, init)))
                .collect::<Vec<_>>()
        };
        // Untried joint actions look like the worst case for the punished
        // player, so the team's minimax tries them instead of settling on a
        // tie between unvisited zeros.
        let floor = -game.max_abs_reward() * game.max_stage_steps() as f64;
        let cycle = (0..sigma.order() as u64)
            .map(|k| {
                let g = game.symmetry(&sigma.pow(k));
                let inv = g.inverse_actions();
                (g, inv)
            })
            .collect();
        let initial_state = crate::solver::argmax(game.initial_distribution());
        Ok(Self {
            seat,
            params: config.params,
            // Optimistic start: untried joint actions look as good as the best
            // single outcome, so greedy team play visits them.
            qc: QTable::filled(TableRole::Cooperative, ns, nj, game.max_joint_reward()),
            qr: per_opponent(TableRole::Retaliation, floor),
            qd: per_opponent(TableRole::Defection, 0.0),
            counter: VisitCounter::new(config.rate_key, ns, nj),
            explorer: ExplorationProcess::new(config.epsilon, config.decay, config.team_seed)?,
            team_rng: ChaCha8Rng::seed_from_u64(config.team_seed ^ 0x5eed_7ea3_0000_0001),
            sigma,
            cycle,
            stage: 0,
            retaliation: None,
            solver: MatrixSolver::default(),
            minimax_cache: vec![vec![None; ns]; n],
            expected: vec![None; n],
            exploring: false,
            explore_draw: vec![0; n],
            log: Vec::new(),
            initial_state,
            name: "fcl".to_string(),
            js,
            game,
        })
    }

    /// A full team of FCL players sharing one seed.
    pub fn team(game: &Arc<GameSpec>, config: &FclConfig) -> Result<Vec<FclAgent>> {
        (0..game.num_players()).map(|i| FclAgent::new(game.clone(), i, config)).collect()
    }

    pub fn seat(&self) -> usize {
        self.seat
    }

    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    pub fn qc(&self) -> &QTable {
        &self.qc
    }

    pub fn qr(&self, j: usize) -> Option<&QTable> {
        self.qr.get(j).and_then(Option::as_ref)
    }

    pub fn qd(&self, j: usize) -> Option<&QTable> {
        self.qd.get(j).and_then(Option::as_ref)
    }

    pub fn sigma(&self) -> &PlayerPermutation {
        &self.sigma
    }

    pub fn stage_index(&self) -> u64 {
        self.stage
    }

    pub fn retaliation_target(&self) -> Option<usize> {
        self.retaliation.as_ref().map(|r| r.target)
    }

    /// Punishment stages still owed, `None` when not retaliating.
    pub fn retaliation_remaining(&self) -> Option<RetaliationCount> {
        self.retaliation.as_ref().map(|r| match r.required {
            RetaliationCount::Finite(k) => RetaliationCount::Finite(k.saturating_sub(r.served)),
            RetaliationCount::Unbounded => RetaliationCount::Unbounded,
        })
    }

    fn cycle_entry(&self, stage: u64) -> &(Symmetry, Vec<usize>) {
        &self.cycle[(stage % self.cycle.len() as u64) as usize]
    }

    /// Joint action the team is scheduled to play at `s` in stage `stage`:
    /// player `m` plays `φ_A⁻¹(π^Σ(φ_S(s))[ψ(m)])` with `ψ = σ^stage`.
    pub fn egalitarian_joint(&self, s: usize, stage: u64) -> usize {
        let (g, inv) = self.cycle_entry(stage);
        let coop = self.qc.argmax(g.states[s]);
        let mut out = 0;
        for m in 0..self.js.num_players() {
            let role = self.js.component(coop, g.players.apply(m));
            out = self.js.with_component(out, m, inv[role]);
        }
        out
    }

    fn minimax(&mut self, j: usize, s: usize) -> &MatrixSolution {
        if self.minimax_cache[j][s].is_none() {
            let q = self.qr[j].as_ref().expect("retaliation table for an opponent");
            let sol = crate::learning::minimax_solution(q, &self.js, j, s, &mut self.solver)
                .expect("finite tables always yield a matrix-game solution");
            self.minimax_cache[j][s] = Some(sol);
        }
        self.minimax_cache[j][s].as_ref().unwrap()
    }

    /// `(V^c, V^r_j, V^d_j)` at the stage-initial state from the current tables.
    pub fn value_estimates(&mut self, j: usize) -> (f64, f64, f64) {
        let s0 = self.initial_state;
        let n = self.js.num_players() as f64;
        let vc = self.qc.max(s0) / n;
        let vr = self.minimax(j, s0).value;
        let vd = (0..self.cycle.len() as u64)
            .map(|k| {
                let coop = self.egalitarian_joint(s0, k);
                defection_value(self.qd[j].as_ref().unwrap(), &self.js, j, s0, coop)
            })
            .fold(f64::NEG_INFINITY, f64::max);
        (vc, vr, vd)
    }

    fn current_count(&mut self, j: usize) -> RetaliationCount {
        let (vc, vr, vd) = self.value_estimates(j);
        // Estimates with V^c below V^r cannot certify any finite count.
        retaliation_count(vd, vc, vr, self.params.retaliation_bonus).unwrap_or(RetaliationCount::Unbounded)
    }

    /// Samples the team's punishment of `j` at `s` and returns the full joint
    /// action with `j`'s component left at 0.
    fn retaliation_joint(&mut self, j: usize, s: usize) -> usize {
        let col = {
            let sol = self.minimax(j, s);
            sol.col.clone()
        };
        let team = sample_index(&col, &mut self.team_rng);
        self.js.join(j, 0, team)
    }

    fn learn(&mut self, tr: &Transition) {
        let s = tr.state;
        let alpha = self.counter.visit(s, tr.joint);
        let gamma = self.params.gamma;
        let mut step = Step {
            state: s,
            col: tr.joint,
            reward: tr.rewards.iter().sum(),
            next_state: tr.next_state,
            terminal: tr.stage_end,
        };
        q_update_cooperative(&mut self.qc, &step, alpha, gamma);
        let coop_next = (!tr.stage_end).then(|| self.egalitarian_joint(tr.next_state, self.stage));
        for j in 0..self.js.num_players() {
            if j == self.seat {
                continue;
            }
            step.reward = tr.rewards[j];
            let next_r = if tr.stage_end { 0.0 } else { self.minimax(j, tr.next_state).value };
            td_update(self.qr[j].as_mut().unwrap(), s, tr.joint, step.reward + gamma * next_r, alpha);
            self.minimax_cache[j][s] = None;
            q_update_defection(
                self.qd[j].as_mut().unwrap(),
                &self.js,
                j,
                &step,
                coop_next.unwrap_or(0),
                alpha,
                gamma,
            );
        }
    }
}

impl Agent for FclAgent {
    fn name(&self) -> &str {
        &self.name
    }

    fn act(&mut self, obs: &Observation) -> usize {
        let n = self.js.num_players();
        let s = obs.state;
        self.exploring = self
            .explorer
            .explore_now(obs.step)
            .expect("FCL exploration clock must follow the global step counter");
        if self.exploring {
            for p in 0..n {
                self.explore_draw[p] = self.explorer.uniform_action(self.js.sizes()[p]);
            }
        }
        if let Some(target) = self.retaliation_target() {
            let joint = self.retaliation_joint(target, s);
            for m in 0..n {
                self.expected[m] = (m != target).then(|| self.js.component(joint, m));
            }
            self.exploring = false;
            return self.expected[self.seat].unwrap();
        }
        if self.exploring {
            self.expected.iter_mut().for_each(|e| *e = None);
            return self.explore_draw[self.seat];
        }
        let joint = self.egalitarian_joint(s, self.stage);
        for m in 0..n {
            self.expected[m] = Some(self.js.component(joint, m));
        }
        self.expected[self.seat].unwrap()
    }

    fn observe(&mut self, tr: &Transition) {
        self.learn(tr);
        let defectors = detect_defection(&self.expected, &tr.actions, self.exploring);
        for j in defectors {
            if j == self.seat {
                continue;
            }
            let count = self.current_count(j);
            self.log.push(DefectionEvent {
                defector: j,
                stage: self.stage,
                step: tr.step,
                state: tr.state,
                expected: self.expected[j].unwrap(),
                played: tr.actions[j],
                count,
            });
            self.retaliation = Some(Retaliation {
                target: j,
                required: count,
                served: 0,
                in_defection_stage: true,
            });
        }
    }

    fn end_stage(&mut self, _record: &StageRecord) {
        if let Some(mut r) = self.retaliation.take() {
            if r.in_defection_stage {
                r.in_defection_stage = false;
            } else {
                r.served += 1;
            }
            let required = match r.required {
                RetaliationCount::Unbounded => self.current_count(r.target),
                finite => finite,
            };
            r.required = required;
            let done = matches!(required, RetaliationCount::Finite(k) if r.served >= k);
            if !done {
                self.retaliation = Some(r);
            }
        }
        self.stage += 1;
    }

    fn defection_log(&self) -> &[DefectionEvent] {
        &self.log
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::build_game;

    #[test]
    fn retaliation_count_cases() {
        assert_eq!(retaliation_count(0.0, -1.0, -2.0, 1).unwrap(), RetaliationCount::Finite(2));
        assert_eq!(retaliation_count(0.0, 0.0, 0.0, 1).unwrap(), RetaliationCount::Unbounded);
        assert_eq!(retaliation_count(-1.0, -1.0, -2.0, 1).unwrap(), RetaliationCount::Finite(1));
        assert_eq!(retaliation_count(10.0, 3.5, -2.0, 0).unwrap(), RetaliationCount::Finite(2));
        assert!(retaliation_count(0.0, -3.0, -2.0, 1).is_err());
    }

    #[test]
    fn schedule_alternates_roles() {
        let sigma = cyclic_permutation(2).unwrap();
        let coop = JointAction(vec![0, 1]);
        assert_eq!(egalitarian_schedule(&sigma, 0, &coop).0, vec![0, 1]);
        assert_eq!(egalitarian_schedule(&sigma, 1, &coop).0, vec![1, 0]);
        let same = JointAction(vec![0, 0, 0]);
        let sigma3 = cyclic_permutation(3).unwrap();
        for t in 0..6 {
            assert_eq!(egalitarian_schedule(&sigma3, t, &same), same);
        }
    }

    #[test]
    fn detection_rules() {
        assert!(detect_defection(&[Some(0), Some(0)], &[0, 0], false).is_empty());
        assert_eq!(detect_defection(&[Some(0), Some(0)], &[0, 1], false), vec![1]);
        assert!(detect_defection(&[Some(0), Some(0)], &[1, 1], true).is_empty());
        assert!(detect_defection(&[Some(0), None], &[0, 1], false).is_empty());
    }

    #[test]
    fn table_count_is_two_n_minus_one() {
        let g = Arc::new(build_game("cake").unwrap());
        let a = FclAgent::new(g, 1, &FclConfig::default()).unwrap();
        let tables = 1 + (0..3).filter(|&j| a.qr(j).is_some()).count() + (0..3).filter(|&j| a.qd(j).is_some()).count();
        assert_eq!(tables, 5);
    }
}
