use std::fmt::Write;

use super::runner::ExperimentResult;
use super::summary::{mean_stderr, summarize, Summary, LATE_FRACTION};
use crate::error::Result;
use crate::game::GameSpec;
use crate::oracle::{exact_values, fmt_value};

/// Minimax (retaliation) value of each player, or `None` when the game is too
/// large for the exact oracle.
pub fn minimax_reference(game: &GameSpec, gamma: f64) -> Option<Vec<f64>> {
    exact_values(game, gamma)
        .ok()
        .map(|v| v.players.iter().map(|p| p.v_retaliate).collect())
}

/// Plain-text summary of an experiment.
pub fn text_report(game: &GameSpec, gamma: f64, result: &ExperimentResult, window: usize) -> Result<String> {
    let summary = summarize(&result.rows, window)?;
    Ok(render(game, &summary, result, minimax_reference(game, gamma).as_deref()))
}

pub fn render(game: &GameSpec, summary: &Summary, result: &ExperimentResult, minimax: Option<&[f64]>) -> String {
    let mut out = String::new();
    let runs = result.records.len();
    let stages = summary.seats.first().map_or(0, |s| s.mean.len());
    let _ = writeln!(out, "game {} runs {runs} stages {stages}", game.name());
    if let Some(rec) = result.records.first() {
        let _ = writeln!(out, "config {}", &rec.config_hash[..16]);
    }
    for seat in &summary.seats {
        let finals: Vec<f64> = result.records.iter().map(|r| r.final_averages[seat.seat]).collect();
        let (fm, fs) = mean_stderr(&finals);
        let (lm, ls) = seat.late_window(LATE_FRACTION);
        let _ = write!(
            out,
            "seat {} {:<16} overall {:>10.4} ± {:.4}  late {:>10.4} ± {:.4}",
            seat.seat, seat.algo, fm, fs, lm, ls
        );
        if let Some(m) = minimax {
            let _ = write!(out, "  minimax {}", fmt_value(m[seat.seat]));
        }
        out.push('\n');
    }
    let events: usize = result.records.iter().map(|r| r.retaliation_events.len()).sum();
    if events > 0 {
        let _ = writeln!(out, "retaliations {events} ({:.2} per run)", events as f64 / runs.max(1) as f64);
    }
    let secs: f64 = result.records.iter().map(|r| r.wall_clock_secs).sum();
    let _ = writeln!(out, "cpu seconds {secs:.2}");
    out
}
