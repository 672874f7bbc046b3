use std::collections::BTreeMap;

use super::runner::ResultRow;
use crate::error::{validation, Result};

/// Learning curve of one seat across runs.
#[derive(Clone, Debug, PartialEq)]
pub struct SeatCurve {
    pub seat: usize,
    pub algo: String,
    /// Cross-run mean of the stage return, per stage.
    pub mean: Vec<f64>,
    /// Standard error of that mean (0 with a single run).
    pub stderr: Vec<f64>,
    /// Trailing moving average of `mean`.
    pub smoothed: Vec<f64>,
    /// Per-run stage returns, `[run][stage]`.
    pub by_run: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub window: usize,
    pub seats: Vec<SeatCurve>,
}

/// Mean and standard error of a sample (standard error 0 for one value).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn moving_average(xs: &[f64], window: usize) -> Vec<f64> {
    let w = window.max(1);
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    for i in 0..xs.len() {
        acc += xs[i];
        if i >= w {
            acc -= xs[i - w];
        }
        out.push(acc / (i + 1).min(w) as f64);
    }
    out
}

/// Per-seat cross-run curves.
pub fn summarize(rows: &[ResultRow], window: usize) -> Result<Summary> {
    if rows.is_empty() {
        return Err(validation("rows", "nothing to summarize"));
    }
    // seat -> run -> stage returns in stage order
    let mut grouped: BTreeMap<usize, (String, BTreeMap<usize, Vec<(u64, f64)>>)> = BTreeMap::new();
    for r in rows {
        let entry = grouped.entry(r.seat).or_insert_with(|| (r.algo.clone(), BTreeMap::new()));
        entry.1.entry(r.run).or_default().push((r.stage, r.stage_return));
    }
    let mut seats = Vec::new();
    for (seat, (algo, runs)) in grouped {
        let by_run: Vec<Vec<f64>> = runs
            .into_values()
            .map(|mut v| {
                v.sort_by_key(|x| x.0);
                v.into_iter().map(|x| x.1).collect()
            })
            .collect();
        let stages = by_run.iter().map(Vec::len).min().unwrap_or(0);
        let mut mean = Vec::with_capacity(stages);
        let mut stderr = Vec::with_capacity(stages);
        let mut column = Vec::with_capacity(by_run.len());
        for t in 0..stages {
            column.clear();
            column.extend(by_run.iter().map(|r| r[t]));
            let (m, s) = mean_stderr(&column);
            mean.push(m);
            stderr.push(s);
        }
        let smoothed = moving_average(&mean, window);
        seats.push(SeatCurve {
            seat,
            algo,
            mean,
            stderr,
            smoothed,
            by_run,
        });
    }
    Ok(Summary { window, seats })
}

impl SeatCurve {
    /// Mean stage return over the final `fraction` of stages, with the
    /// standard error across runs of the per-run late means.
    pub fn late_window(&self, fraction: f64) -> (f64, f64) {
        let stages = self.mean.len();
        let len = ((stages as f64 * fraction).ceil() as usize).clamp(1, stages.max(1));
        let per_run: Vec<f64> = self
            .by_run
            .iter()
            .map(|r| r[stages - len..stages].iter().sum::<f64>() / len as f64)
            .collect();
        mean_stderr(&per_run)
    }
}

/// Fraction of stages forming the late window.
pub const LATE_FRACTION: f64 = 0.1;

#[cfg(test)]
mod tests {
    use super::*;

    fn row(run: usize, stage: u64, r: f64) -> ResultRow {
        ResultRow {
            run,
            stage,
            seat: 0,
            algo: "x".into(),
            stage_return: r,
            cum_avg: 0.0,
        }
    }

    #[test]
    fn single_run_has_zero_stderr() {
        let s = summarize(&[row(0, 0, 1.0), row(0, 1, 3.0)], 2).unwrap();
        assert_eq!(s.seats[0].stderr, vec![0.0, 0.0]);
        assert_eq!(s.seats[0].smoothed, vec![1.0, 2.0]);
    }

    #[test]
    fn constant_returns_give_flat_curve() {
        let rows: Vec<_> = (0..3).flat_map(|run| (0..10).map(move |t| row(run, t, 2.5))).collect();
        let s = summarize(&rows, 4).unwrap();
        assert!(s.seats[0].mean.iter().all(|&m| m == 2.5));
        assert!(s.seats[0].stderr.iter().all(|&e| e == 0.0));
        assert_eq!(s.seats[0].late_window(0.1), (2.5, 0.0));
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(summarize(&[], 5).is_err());
    }
}
