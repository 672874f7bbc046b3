//! Experiment configuration, seeded parallel runs, CSV output and summaries.

pub mod config;
pub mod report;
pub mod runner;
pub mod summary;

pub use config::{parse_config, ExperimentConfig, SeatSpec, ALGORITHMS};
pub use report::{minimax_reference, text_report};
pub use runner::{read_csv, run_experiment, write_csv, ExperimentResult, ResultRow, RunRecord};
pub use summary::{summarize, SeatCurve, Summary, LATE_FRACTION};
