#![allow(dead_code)]

use fcl::harness::{run_experiment, summarize, ExperimentConfig, SeatSpec, LATE_FRACTION};

/// Late-window (final 10%) mean stage return of every seat.
pub fn late_means(game: &str, seats: &[&str], runs: usize, stages: u64, seed: u64) -> Vec<f64> {
    let seats = seats
        .iter()
        .map(|s| match s.strip_prefix("fixed:") {
            Some(label) => SeatSpec {
                action: Some(label.to_string()),
                ..SeatSpec::new("fixed")
            },
            None => SeatSpec::new(s),
        })
        .collect();
    let mut config = ExperimentConfig::new(game, runs, stages, seats);
    config.base_seed = seed;
    let result = run_experiment(&config).expect("experiment runs");
    let summary = summarize(&result.rows, config.window).expect("rows to summarize");
    summary.seats.iter().map(|s| s.late_window(LATE_FRACTION).0).collect()
}

/// Prints one verdict line and fails the test when `ok` is false.
pub fn verdict(name: &str, ok: bool, detail: impl AsRef<str>) {
    let tag = if ok { "PASS" } else { "FAIL" };
    // Written to the raw handle so the line shows up without --nocapture.
    use std::io::Write;
    let _ = writeln!(std::io::stderr(), "[{tag}] {name}: {}", detail.as_ref());
    assert!(ok, "{name}: {}", detail.as_ref());
}

/// Brute-force values for two-player one-shot games, written independently of
/// the library's dynamic-programming oracle and LP solver.
pub mod brute {
    use fcl::game::GameSpec;

    pub struct MatrixValues {
        /// Egalitarian value: best joint sum shared equally.
        pub v_coop: f64,
        /// Team minimax value (team mixes, player picks a row).
        pub v_retaliate: f64,
        /// Best response to the team's part of the cooperative cycle.
        pub v_defect: f64,
        /// Retaliation stages before the bonus, `None` when unbounded.
        pub k: Option<u64>,
    }

    /// `payoff[j][a][b]`: player j's reward when player 0 plays `a`, player 1 `b`.
    pub fn payoffs(game: &GameSpec) -> Vec<Vec<Vec<f64>>> {
        let (n0, n1) = (game.num_actions(0), game.num_actions(1));
        (0..2)
            .map(|j| {
                (0..n0)
                    .map(|a| (0..n1).map(|b| game.expected_rewards(0, a * n1 + b)[j]).collect())
                    .collect()
            })
            .collect()
    }

    fn solve(mut m: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
        let n = rhs.len();
        for c in 0..n {
            let p = (c..n).max_by(|&x, &y| m[x][c].abs().total_cmp(&m[y][c].abs()))?;
            if m[p][c].abs() < 1e-12 {
                return None;
            }
            m.swap(c, p);
            rhs.swap(c, p);
            for r in 0..n {
                if r != c {
                    let f = m[r][c] / m[c][c];
                    for k in 0..n {
                        m[r][k] -= f * m[c][k];
                    }
                    rhs[r] -= f * rhs[c];
                }
            }
        }
        Some((0..n).map(|i| rhs[i] / m[i][i]).collect())
    }

    /// `min over column mixes q of max over rows of (M q)_row`, by visiting
    /// every vertex of the arrangement of row-equality and `q_c = 0` planes.
    pub fn min_max(m: &[Vec<f64>]) -> f64 {
        let k = m[0].len();
        let mut planes: Vec<Vec<f64>> = Vec::new();
        for a in 0..m.len() {
            for b in a + 1..m.len() {
                planes.push((0..k).map(|c| m[a][c] - m[b][c]).collect());
            }
        }
        for c in 0..k {
            planes.push((0..k).map(|d| if d == c { 1.0 } else { 0.0 }).collect());
        }
        let mut best = f64::INFINITY;
        let mut pick = vec![0usize; k - 1];
        fn rec(
            start: usize,
            depth: usize,
            pick: &mut Vec<usize>,
            planes: &[Vec<f64>],
            m: &[Vec<f64>],
            best: &mut f64,
        ) {
            let k = m[0].len();
            if depth == k - 1 {
                let mut rows: Vec<Vec<f64>> = pick.iter().map(|&p| planes[p].clone()).collect();
                rows.push(vec![1.0; k]);
                let mut rhs = vec![0.0; k - 1];
                rhs.push(1.0);
                if let Some(q) = solve(rows, rhs) {
                    if q.iter().all(|&x| x > -1e-12) {
                        let v = m
                            .iter()
                            .map(|row| row.iter().zip(&q).map(|(a, b)| a * b).sum::<f64>())
                            .fold(f64::NEG_INFINITY, f64::max);
                        *best = best.min(v);
                    }
                }
                return;
            }
            for p in start..planes.len() {
                pick[depth] = p;
                rec(p + 1, depth + 1, pick, planes, m, best);
            }
        }
        rec(0, 0, &mut pick, &planes, m, &mut best);
        best
    }

    pub fn values(game: &GameSpec) -> [MatrixValues; 2] {
        let p = payoffs(game);
        let (n0, n1) = (p[0].len(), p[0][0].len());
        // Sum-maximising cell, lowest joint index on ties.
        let mut coop = (0, 0);
        for a in 0..n0 {
            for b in 0..n1 {
                let s = p[0][a][b] + p[1][a][b];
                if s > p[0][coop.0][coop.1] + p[1][coop.0][coop.1] + 1e-12 {
                    coop = (a, b);
                }
            }
        }
        let sum = p[0][coop.0][coop.1] + p[1][coop.0][coop.1];
        let v_coop = sum / 2.0;
        let one = |j: usize| {
            // Rows: j's actions; columns: the partner's actions.
            let m: Vec<Vec<f64>> = if j == 0 {
                p[0].clone()
            } else {
                (0..n1).map(|b| (0..n0).map(|a| p[1][a][b]).collect()).collect()
            };
            let v_retaliate = min_max(&m);
            // Partner plays its cooperative component in either cycle
            // position (roles swap between the two stages).
            let partner_moves = [if j == 0 { coop.1 } else { coop.0 }, if j == 0 { coop.0 } else { coop.1 }];
            let v_defect = partner_moves
                .iter()
                .map(|&t| m.iter().map(|row| row[t]).fold(f64::NEG_INFINITY, f64::max))
                .fold(f64::NEG_INFINITY, f64::max);
            let gap = v_coop - v_retaliate;
            let k = (gap > 1e-6).then(|| (((v_defect - v_coop) / gap) - 1e-9).ceil().max(0.0) as u64);
            MatrixValues {
                v_coop,
                v_retaliate,
                v_defect,
                k,
            }
        };
        [one(0), one(1)]
    }
}
