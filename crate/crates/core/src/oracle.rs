//! Exact values of small games by backward induction over the stage horizon.
//!
//! Stages last at most `max_stage_steps` steps, so every value below is the
//! finite-horizon optimum with time-indexed policies; no contraction argument
//! is needed even with `γ = 1`.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{ensure, Error, Result};
use crate::fcl::{retaliation_count, RetaliationCount};
use crate::game::{
    cyclic_permutation, evaluate_profile, DeterministicProfile, GameSpec, Profile, StationaryProfile, TransportedProfile,
};
use crate::learning::{QTable, TableRole};
use crate::solver::{argmax, MatrixSolver, MatrixView};

/// Largest `states x joint actions` the exact solvers accept.
pub const MAX_PAIRS: usize = 200_000;

/// Equality tolerance for exact checks.
pub const EXACT_TOL: f64 = 1e-9;

fn check_capacity(game: &GameSpec) -> Result<()> {
    let pairs = game.num_states() * game.num_joint_actions();
    if pairs > MAX_PAIRS {
        return Err(Error::Capacity {
            pairs,
            limit: MAX_PAIRS,
        });
    }
    Ok(())
}

/// The game seen as one decision maker choosing joint actions to maximise
/// the sum of rewards.
#[derive(Clone, Debug)]
pub struct JointMdp {
    pub num_states: usize,
    pub num_actions: usize,
    /// `[s * A + a]` → `(next, prob)` pairs.
    pub transitions: Vec<Vec<(usize, f64)>>,
    /// Expected summed reward of `(s, a)`.
    pub rewards: Vec<f64>,
    pub absorbing: Vec<bool>,
}

impl JointMdp {
    pub fn from_game(game: &GameSpec) -> Result<Self> {
        check_capacity(game)?;
        let (ns, nj) = (game.num_states(), game.num_joint_actions());
        let mut transitions = Vec::with_capacity(ns * nj);
        let mut rewards = Vec::with_capacity(ns * nj);
        for s in 0..ns {
            for a in 0..nj {
                transitions.push(game.outcomes(s, a).iter().map(|o| (o.next, o.prob)).collect());
                rewards.push(game.expected_rewards(s, a).iter().sum());
            }
        }
        Ok(Self {
            num_states: ns,
            num_actions: nj,
            transitions,
            rewards,
            absorbing: (0..ns).map(|s| game.is_absorbing(s)).collect(),
        })
    }

    /// `Q_h` for `h = 1..=horizon` steps to go (index `h - 1`).
    pub fn backward_induction(&self, horizon: usize, gamma: f64) -> Vec<QTable> {
        let mut out: Vec<QTable> = Vec::with_capacity(horizon);
        let mut v = vec![0.0; self.num_states];
        for _ in 0..horizon {
            let mut q = QTable::new(TableRole::Cooperative, self.num_states, self.num_actions);
            for s in 0..self.num_states {
                for a in 0..self.num_actions {
                    let k = s * self.num_actions + a;
                    let cont: f64 = self.transitions[k]
                        .iter()
                        .map(|&(n, p)| if self.absorbing[n] { 0.0 } else { p * v[n] })
                        .sum();
                    q.set(s, a, self.rewards[k] + gamma * cont);
                }
            }
            v = (0..self.num_states).map(|s| q.max(s)).collect();
            out.push(q);
        }
        out
    }
}

/// Sum-maximising time-indexed profile and what it pays.
#[derive(Clone, Debug)]
pub struct CooperativeSolution {
    /// `Q^c` with the full stage ahead (what a stationary learner estimates).
    pub qc: QTable,
    /// `Q_h` for `h = 1..=H` steps to go.
    pub q_by_steps_left: Vec<QTable>,
    pub profile: DeterministicProfile,
    /// Expected summed stage return.
    pub sum_value: f64,
    /// Each player's own stage return under `profile`.
    pub per_player: Vec<f64>,
}

pub fn exact_cooperative_values(game: &GameSpec, gamma: f64) -> Result<CooperativeSolution> {
    let mdp = JointMdp::from_game(game)?;
    let h = game.max_stage_steps();
    let q_by_steps_left = mdp.backward_induction(h, gamma);
    // Step k of the stage has h - k steps to go.
    let joint = (0..h)
        .map(|k| {
            let q = &q_by_steps_left[h - 1 - k];
            (0..game.num_states()).map(|s| q.argmax(s)).collect()
        })
        .collect();
    let profile = DeterministicProfile::new(game, joint);
    let per_player = evaluate_profile(game, &profile, h)?;
    let qc = q_by_steps_left[h - 1].clone();
    let sum_value = expected_over_initial(game, |s| qc.max(s));
    Ok(CooperativeSolution {
        qc,
        q_by_steps_left,
        profile,
        sum_value,
        per_player,
    })
}

fn expected_over_initial(game: &GameSpec, f: impl Fn(usize) -> f64) -> f64 {
    game.initial_distribution()
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(s, &p)| p * f(s))
        .sum()
}

/// `r_j + γ·V(s')` expectation for one `(s, joint)` given next-step values.
fn backup(game: &GameSpec, j: usize, s: usize, a: usize, v: &[f64], gamma: f64) -> f64 {
    game.outcomes(s, a)
        .iter()
        .map(|o| {
            let cont = if game.is_absorbing(o.next) { 0.0 } else { v[o.next] };
            o.prob * (o.rewards[j] + gamma * cont)
        })
        .sum()
}

/// Value of player `j` against a team minimising it.
#[derive(Clone, Debug)]
pub struct MinimaxSolution {
    pub value: f64,
    /// `Q^r_j` with the full stage ahead.
    pub qr: QTable,
    /// Team's optimal mixed strategy at each state for the first step,
    /// over the others' joint actions.
    pub team_strategy: Vec<Vec<f64>>,
}

/// Zero-sum backward induction for `j` versus everyone else, with mixed
/// strategies on both sides at every state.
pub fn exact_minimax_values(game: &GameSpec, j: usize, gamma: f64) -> Result<MinimaxSolution> {
    minimax_backward(game, j, gamma, false)
}

/// Same, but `j` restricted to pure actions (max over rows of the min over
/// the team's joint actions).
pub fn exact_pure_maxmin_values(game: &GameSpec, j: usize, gamma: f64) -> Result<MinimaxSolution> {
    minimax_backward(game, j, gamma, true)
}

fn minimax_backward(game: &GameSpec, j: usize, gamma: f64, pure: bool) -> Result<MinimaxSolution> {
    check_capacity(game)?;
    ensure!(j < game.num_players(), "player {j} out of range");
    let js = game.joint();
    let (ns, nj) = (game.num_states(), js.len());
    let rows = js.sizes()[j];
    let cols = nj / rows;
    let mut solver = MatrixSolver::default();
    let mut v = vec![0.0; ns];
    let mut q = QTable::new(TableRole::Retaliation(j), ns, nj);
    let mut team_strategy = vec![Vec::new(); ns];
    let mut buf = vec![0.0; nj];
    for _ in 0..game.max_stage_steps() {
        let mut next_v = vec![0.0; ns];
        for s in 0..ns {
            for a in 0..nj {
                q.set(s, a, backup(game, j, s, a, &v, gamma));
            }
            if game.is_absorbing(s) {
                continue;
            }
            for r in 0..rows {
                for c in 0..cols {
                    buf[r * cols + c] = q.get(s, js.join(j, r, c));
                }
            }
            let sol = solver.solve(rows, cols, &buf)?;
            next_v[s] = if pure {
                crate::solver::pure_maxmin(&MatrixView::new(rows, cols, buf.clone())?).1
            } else {
                sol.value
            };
            team_strategy[s] = sol.col;
        }
        v = next_v;
    }
    Ok(MinimaxSolution {
        value: expected_over_initial(game, |s| v[s]),
        qr: q,
        team_strategy,
    })
}

/// Joint action scheduled at `(s, step)` in cycle position `k`.
fn scheduled_joint(game: &GameSpec, coop: &DeterministicProfile, k: u64, s: usize, step: usize) -> usize {
    let n = game.num_players();
    let sigma = cyclic_permutation(n).expect("at least two players");
    let moved = TransportedProfile::new(game, coop, &sigma.pow(k));
    let mut out = vec![0; n];
    for (m, slot) in out.iter_mut().enumerate() {
        *slot = (0..game.num_actions(m))
            .find(|&a| moved.prob(m, s, step, a) > 0.5)
            .expect("pure profile");
    }
    game.joint().encode(&out)
}

/// Best-response values of `j` against the cooperative profile.
#[derive(Clone, Debug)]
pub struct DefectSolution {
    /// One entry per position in the N-stage cycle.
    pub per_position: Vec<f64>,
    pub value: f64,
    /// `Q^d_j` with the full stage ahead, cycle position 0.
    pub qd: QTable,
}

/// `j` best-responds by backward induction while the others follow their
/// scheduled component of `coop` in each cycle position.
pub fn exact_defect_value(game: &GameSpec, coop: &DeterministicProfile, j: usize, gamma: f64) -> Result<DefectSolution> {
    check_capacity(game)?;
    ensure!(j < game.num_players(), "player {j} out of range");
    let n = game.num_players();
    let js = game.joint();
    let (ns, nj) = (game.num_states(), js.len());
    let h = game.max_stage_steps();
    let mut per_position = Vec::with_capacity(n);
    let mut qd0 = None;
    for k in 0..n as u64 {
        let mut v = vec![0.0; ns];
        let mut q = QTable::new(TableRole::Defection(j), ns, nj);
        for left in 1..=h {
            let step = h - left;
            let mut next_v = vec![0.0; ns];
            for s in 0..ns {
                for a in 0..nj {
                    q.set(s, a, backup(game, j, s, a, &v, gamma));
                }
                if !game.is_absorbing(s) {
                    let sched = scheduled_joint(game, coop, k, s, step);
                    next_v[s] = (0..js.sizes()[j])
                        .map(|aj| q.get(s, js.with_component(sched, j, aj)))
                        .fold(f64::NEG_INFINITY, f64::max);
                }
            }
            v = next_v;
        }
        per_position.push(expected_over_initial(game, |s| v[s]));
        if k == 0 {
            qd0 = Some(q);
        }
    }
    let value = per_position.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(DefectSolution {
        per_position,
        value,
        qd: qd0.expect("at least one position"),
    })
}

/// Ground truth for one player.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerValues {
    /// Own stage return under the sum-maximising profile.
    pub v_coop: f64,
    pub v_retaliate: f64,
    /// Best defection payoff over the cycle positions.
    pub v_defect: f64,
    pub v_defect_by_position: Vec<f64>,
    /// Average stage return over one N-stage cycle of the schedule.
    pub v_egalitarian: f64,
    /// Punishment stages needed, without the bonus stage.
    pub k: RetaliationCount,
    /// Cooperation pays no more than the minimax value.
    pub unbounded: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExactValues {
    pub game: String,
    pub players: Vec<PlayerValues>,
    pub sum_value: f64,
}

pub fn exact_values(game: &GameSpec, gamma: f64) -> Result<ExactValues> {
    let coop = exact_cooperative_values(game, gamma)?;
    let n = game.num_players();
    let egal = cycle_returns(game, &coop.profile)?;
    let mut players = Vec::with_capacity(n);
    for j in 0..n {
        let vr = exact_minimax_values(game, j, gamma)?.value;
        let d = exact_defect_value(game, &coop.profile, j, gamma)?;
        let ve = egal.iter().map(|r| r[j]).sum::<f64>() / n as f64;
        // Ground-truth values may sit a hair below V^r from rounding; the
        // report flags rather than fails in that case.
        let k = retaliation_count(d.value, ve, vr, 0).unwrap_or(RetaliationCount::Unbounded);
        players.push(PlayerValues {
            v_coop: coop.per_player[j],
            v_retaliate: vr,
            v_defect: d.value,
            v_defect_by_position: d.per_position,
            v_egalitarian: ve,
            unbounded: k == RetaliationCount::Unbounded,
            k,
        });
    }
    Ok(ExactValues {
        game: game.name().to_string(),
        players,
        sum_value: coop.sum_value,
    })
}

/// Returns of every player in each of the N scheduled stages.
fn cycle_returns(game: &GameSpec, coop: &DeterministicProfile) -> Result<Vec<Vec<f64>>> {
    let n = game.num_players();
    let sigma = cyclic_permutation(n)?;
    (0..n as u64)
        .map(|k| {
            let moved = TransportedProfile::new(game, coop, &sigma.pow(k));
            evaluate_profile(game, &moved, game.max_stage_steps())
        })
        .collect()
}

/// Compact number formatting for reports: integers without decimals.
pub fn fmt_value(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        format!("{}", x.round() as i64)
    } else {
        let s = format!("{x:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

impl ExactValues {
    pub fn report(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "game {}", self.game);
        let _ = writeln!(out, "sum_value {}", fmt_value(self.sum_value));
        for (i, p) in self.players.iter().enumerate() {
            let _ = write!(
                out,
                "player {i}: V^c={} V^r={} V^d={} V^eg={} K={}",
                fmt_value(p.v_egalitarian),
                fmt_value(p.v_retaliate),
                fmt_value(p.v_defect),
                fmt_value(p.v_egalitarian),
                p.k
            );
            let _ = writeln!(out, " own_coop={}", fmt_value(p.v_coop));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FolkReport {
    pub passed: bool,
    /// `V^c - (V^d + K·V^r)/(K+1)` per player; `None` when K is unbounded.
    pub margins: Vec<Option<f64>>,
    pub unbounded: Vec<bool>,
}

/// Checks that cooperating pays at least the average of one defection
/// followed by `K` punished stages. With an unbounded `K` the average tends to
/// `V^r` as punishment goes on, so the check reduces to `V^c >= V^r`.
pub fn folk_inequality_check(values: &ExactValues) -> FolkReport {
    let mut margins = Vec::new();
    let mut unbounded = Vec::new();
    let mut passed = true;
    for p in &values.players {
        let vc = p.v_egalitarian;
        match p.k {
            RetaliationCount::Finite(k) => {
                let k = k as f64;
                let m = vc - (p.v_defect + k * p.v_retaliate) / (k + 1.0);
                passed &= m >= -EXACT_TOL;
                margins.push(Some(m));
                unbounded.push(false);
            }
            RetaliationCount::Unbounded => {
                passed &= p.v_retaliate <= vc + EXACT_TOL;
                margins.push(None);
                unbounded.push(true);
            }
        }
    }
    FolkReport {
        passed,
        margins,
        unbounded,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EgalitarianReport {
    /// Average per-stage return of each player over the N-stage cycle.
    pub averages: Vec<f64>,
    /// Largest difference between two players' averages.
    pub spread: f64,
    /// Best minimum-over-players return among the competitors checked.
    pub best_competitor_min: f64,
    pub competitors_checked: usize,
    pub passed: bool,
}

/// Checks that cycling the sum-maximising profile gives every player the same
/// average and that no competing profile guarantees everybody more. Matrix
/// games are checked against every pure joint action and against the best
/// correlated distribution (an LP); larger games against random pure
/// stationary profiles.
pub fn egalitarian_check(game: &GameSpec, samples: usize, seed: u64) -> Result<EgalitarianReport> {
    let coop = exact_cooperative_values(game, 1.0)?;
    let n = game.num_players();
    let cyc = cycle_returns(game, &coop.profile)?;
    let averages: Vec<f64> = (0..n).map(|j| cyc.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let lo = averages.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = averages.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let mut best = f64::NEG_INFINITY;
    let mut checked = 0;
    let min_of = |r: &[f64]| r.iter().copied().fold(f64::INFINITY, f64::min);
    if game.num_states() == 1 && game.max_stage_steps() == 1 {
        let nj = game.num_joint_actions();
        let mut table = Vec::with_capacity(nj * n);
        for a in 0..nj {
            let r = game.expected_rewards(0, a);
            best = best.max(min_of(r));
            table.extend_from_slice(r);
            checked += 1;
        }
        // Rows: joint actions, columns: players; the row player's maxmin is
        // the best guaranteed minimum over correlated profiles.
        let (_, v) = crate::solver::solve_maxmin(&MatrixView::new(nj, n, table)?)?;
        best = best.max(v);
        checked += 1;
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut profiles = vec![StationaryProfile::pure(game, |i, s| {
            game.joint().component(coop.profile.joint_at(s, 0), i)
        })];
        for _ in 0..samples {
            use rand::Rng;
            let choice: Vec<Vec<usize>> = (0..n)
                .map(|i| (0..game.num_states()).map(|_| rng.gen_range(0..game.num_actions(i))).collect())
                .collect();
            profiles.push(StationaryProfile::pure(game, |i, s| choice[i][s]));
        }
        for p in &profiles {
            let r = evaluate_profile(game, p, game.max_stage_steps())?;
            best = best.max(min_of(&r));
            checked += 1;
        }
    }
    Ok(EgalitarianReport {
        spread: hi - lo,
        passed: hi - lo <= EXACT_TOL && best <= lo + EXACT_TOL,
        best_competitor_min: best,
        competitors_checked: checked,
        averages,
    })
}

/// Largest violation of `Q_h(s,a) = Σr + γ Σ P(s') max Q_{h-1}(s', ·)` over
/// every step count, state and joint action.
pub fn bellman_residual(game: &GameSpec, sol: &CooperativeSolution, gamma: f64) -> f64 {
    let mut worst: f64 = 0.0;
    for (h, q) in sol.q_by_steps_left.iter().enumerate() {
        for s in 0..game.num_states() {
            for a in 0..game.num_joint_actions() {
                let mut target: f64 = game.expected_rewards(s, a).iter().sum();
                if h > 0 {
                    let prev = &sol.q_by_steps_left[h - 1];
                    target += gamma
                        * game
                            .outcomes(s, a)
                            .iter()
                            .filter(|o| !game.is_absorbing(o.next))
                            .map(|o| o.prob * prev.max(o.next))
                            .sum::<f64>();
                }
                worst = worst.max((q.get(s, a) - target).abs());
            }
        }
    }
    worst
}

/// Stationary greedy joint action per state of a cooperative table.
pub fn greedy_profile(qc: &QTable) -> Vec<usize> {
    (0..qc.num_states()).map(|s| argmax(qc.row(s))).collect()
}
