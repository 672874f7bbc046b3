//! Runs an experiment from a TOML config, writes the per-stage CSV and reads
//! it back to print the summary.
//!
//! `cargo run --example experiment_csv -- configs/grid_pd.toml`

use fcl::harness::{parse_config, read_csv, summarize, text_report, run_experiment};

fn main() -> fcl::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/ipd.toml").into());
    let mut config = parse_config(&std::fs::read_to_string(&path)?)?;
    let out = std::env::temp_dir().join("fcl_experiment.csv");
    config.output = Some(out.clone());
    let game = config.validate()?;

    let result = run_experiment(&config)?;
    print!("{}", text_report(&game, config.gamma, &result, config.window)?);

    let rows = read_csv(&out)?;
    println!("{} rows in {}", rows.len(), out.display());
    let summary = summarize(&rows, config.window)?;
    for seat in &summary.seats {
        let last = seat.smoothed.last().copied().unwrap_or(f64::NAN);
        println!("seat {} ({}) smoothed final {last:.3}", seat.seat, seat.algo);
    }
    Ok(())
}
