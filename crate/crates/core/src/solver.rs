//! Zero-sum matrix games: mixed max-min by linear programming and pure
//! max-min / min-max enumeration.

use crate::error::{ensure, Error, Result};

/// Probability vector over one player's actions.
pub type MixedStrategy = Vec<f64>;

const PIVOT_EPS: f64 = 1e-12;
const OPT_EPS: f64 = 1e-11;

/// Dense matrix: rows are the focal player's actions, columns the opponents'
/// joint actions.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixView {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl MatrixView {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        ensure!(rows > 0 && cols > 0, "matrix needs at least one row and one column");
        ensure!(data.len() == rows * cols, "expected {} entries, got {}", rows * cols, data.len());
        ensure!(data.iter().all(|x| x.is_finite()), "matrix entries must be finite");
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        ensure!(rows.iter().all(|r| r.len() == cols), "ragged matrix");
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// `-Mᵀ`: the same game seen from the column player.
    pub fn negated_transpose(&self) -> MatrixView {
        let mut data = Vec::with_capacity(self.data.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                data.push(-self.get(r, c));
            }
        }
        MatrixView {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }
}

/// Optimal strategies of both sides and the game value (row player's payoff).
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixSolution {
    pub row: MixedStrategy,
    pub col: MixedStrategy,
    pub value: f64,
}

/// Max over mixed row strategies of the min over columns of the expected entry.
pub fn solve_maxmin(m: &MatrixView) -> Result<(MixedStrategy, f64)> {
    let sol = MatrixSolver::default().solve(m.rows, m.cols, &m.data)?;
    Ok((sol.row, sol.value))
}

/// Both optimal strategies of the zero-sum game `m`.
pub fn solve_matrix_game(m: &MatrixView) -> Result<MatrixSolution> {
    MatrixSolver::default().solve(m.rows, m.cols, &m.data)
}

/// Best row against a worst-case column, lowest index on ties.
pub fn pure_maxmin(m: &MatrixView) -> (usize, f64) {
    pure_maxmin_raw(m.rows, m.cols, &m.data)
}

/// Column minimizing the row player's best reply, lowest index on ties.
pub fn pure_minmax(m: &MatrixView) -> (usize, f64) {
    pure_minmax_raw(m.rows, m.cols, &m.data)
}

fn pure_maxmin_raw(rows: usize, cols: usize, data: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::NEG_INFINITY);
    for r in 0..rows {
        let v = data[r * cols..(r + 1) * cols].iter().copied().fold(f64::INFINITY, f64::min);
        if v > best.1 {
            best = (r, v);
        }
    }
    best
}

fn pure_minmax_raw(rows: usize, cols: usize, data: &[f64]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for c in 0..cols {
        let v = (0..rows).map(|r| data[r * cols + c]).fold(f64::NEG_INFINITY, f64::max);
        if v < best.1 {
            best = (c, v);
        }
    }
    best
}

/// Index of the largest entry, lowest index on ties.
pub fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate().skip(1) {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// Reusable simplex workspace.
///
/// Solves the column player's program `max Σy s.t. M'y ≤ 1, y ≥ 0` on the
/// shifted matrix `M' = M - min(M) + 1` (strictly positive, so the game value
/// is positive). The optimum is `1/v'`; the column strategy is `y` normalised
/// and the row strategy is read from the slack columns of the objective row.
#[derive(Clone, Debug, Default)]
pub struct MatrixSolver {
    tableau: Vec<f64>,
    basis: Vec<usize>,
}

impl MatrixSolver {
    pub fn solve_view(&mut self, m: &MatrixView) -> Result<MatrixSolution> {
        self.solve(m.rows, m.cols, &m.data)
    }

    /// Solves a row-major `rows x cols` matrix game.
    pub fn solve(&mut self, rows: usize, cols: usize, data: &[f64]) -> Result<MatrixSolution> {
        ensure!(rows > 0 && cols > 0 && data.len() == rows * cols, "bad matrix shape");
        let (r, lower) = pure_maxmin_raw(rows, cols, data);
        let (c, upper) = pure_minmax_raw(rows, cols, data);
        if lower == upper {
            let mut row = vec![0.0; rows];
            row[r] = 1.0;
            let mut col = vec![0.0; cols];
            col[c] = 1.0;
            return Ok(MatrixSolution { row, col, value: lower });
        }
        self.simplex(rows, cols, data)
    }

    fn simplex(&mut self, m: usize, n: usize, data: &[f64]) -> Result<MatrixSolution> {
        let min = data.iter().copied().fold(f64::INFINITY, f64::min);
        let shift = 1.0 - min;
        // Columns: y_0..y_{n-1}, slack_0..slack_{m-1}, rhs. Last row is the objective.
        let width = n + m + 1;
        self.tableau.clear();
        self.tableau.resize((m + 1) * width, 0.0);
        let t = &mut self.tableau;
        for i in 0..m {
            for j in 0..n {
                t[i * width + j] = data[i * n + j] + shift;
            }
            t[i * width + n + i] = 1.0;
            t[i * width + width - 1] = 1.0;
        }
        for j in 0..n {
            t[m * width + j] = -1.0;
        }
        self.basis.clear();
        self.basis.extend(n..n + m);

        let max_iter = 50 * (m + n + 10);
        let mut iter = 0;
        loop {
            let t = &mut self.tableau;
            // Bland's rule: lowest-index improving column.
            let Some(enter) = (0..n + m).find(|&j| t[m * width + j] < -OPT_EPS) else {
                break;
            };
            let mut leave: Option<usize> = None;
            let mut best = f64::INFINITY;
            for i in 0..m {
                let a = t[i * width + enter];
                if a > PIVOT_EPS {
                    let ratio = t[i * width + width - 1] / a;
                    let better = match leave {
                        None => true,
                        Some(l) => {
                            ratio < best - 1e-14
                                || (ratio <= best + 1e-14 && self.basis[i] < self.basis[l])
                        }
                    };
                    if better {
                        best = ratio;
                        leave = Some(i);
                    }
                }
            }
            let Some(p) = leave else {
                return Err(Error::Solver("unbounded program".into()));
            };
            let piv = t[p * width + enter];
            for k in 0..width {
                t[p * width + k] /= piv;
            }
            for i in 0..=m {
                if i == p {
                    continue;
                }
                let f = t[i * width + enter];
                if f != 0.0 {
                    for k in 0..width {
                        t[i * width + k] -= f * t[p * width + k];
                    }
                }
            }
            self.basis[p] = enter;
            iter += 1;
            if iter > max_iter {
                return Err(Error::Solver("simplex iteration limit".into()));
            }
        }

        let t = &self.tableau;
        let objective = t[m * width + width - 1];
        if !(objective > 0.0) {
            return Err(Error::Solver(format!("non-positive optimum {objective}")));
        }
        let mut col = vec![0.0; n];
        for (i, &b) in self.basis.iter().enumerate() {
            if b < n {
                col[b] = t[i * width + width - 1].max(0.0);
            }
        }
        let mut row: Vec<f64> = (0..m).map(|i| t[m * width + n + i].max(0.0)).collect();
        normalize(&mut col)?;
        normalize(&mut row)?;
        Ok(MatrixSolution {
            row,
            col,
            value: 1.0 / objective - shift,
        })
    }
}

fn normalize(p: &mut [f64]) -> Result<()> {
    let total: f64 = p.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Solver("empty strategy".into()));
    }
    for x in p.iter_mut() {
        *x /= total;
    }
    Ok(())
}
