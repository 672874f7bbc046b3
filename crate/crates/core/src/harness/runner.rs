use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::ExperimentConfig;
use crate::baselines::{FixedAgent, PgAgent, SelfishQAgent};
use crate::error::Result;
use crate::fcl::{DefectionEvent, FclAgent, FclConfig};
use crate::game::{Agent, GameSpec, Match};
use crate::learning::LearningParams;

/// One CSV record: a seat's return in one stage of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub run: usize,
    pub stage: u64,
    pub seat: usize,
    pub algo: String,
    pub stage_return: f64,
    /// Mean of this seat's stage returns up to and including this stage.
    pub cum_avg: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub run: usize,
    pub config_hash: String,
    pub seed: u64,
    pub wall_clock_secs: f64,
    /// Each seat's mean stage return over the whole run.
    pub final_averages: Vec<f64>,
    /// Defections punished by the first FCL seat (teammates keep identical logs).
    pub retaliation_events: Vec<DefectionEvent>,
}

#[derive(Clone, Debug)]
pub struct ExperimentResult {
    pub rows: Vec<ResultRow>,
    pub records: Vec<RunRecord>,
}

/// SplitMix64 finaliser, used to derive independent stream seeds.
pub fn mix_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn config_hash(config: &ExperimentConfig) -> String {
    let digest = Sha256::digest(config.to_toml().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Seed of run `run`.
pub fn run_seed(config: &ExperimentConfig, run: usize) -> u64 {
    mix_seed(config.base_seed, run as u64)
}

/// Builds the agents of one run.
pub fn build_agents(config: &ExperimentConfig, game: &Arc<GameSpec>, seed: u64) -> Result<Vec<Box<dyn Agent>>> {
    let params = LearningParams::new(config.gamma, config.retaliation_bonus)?;
    let mut agents: Vec<Box<dyn Agent>> = Vec::with_capacity(config.seats.len());
    for (i, seat) in config.seats.iter().enumerate() {
        let (epsilon, decay) = config.exploration(game, i);
        let own_seed = mix_seed(seed, 100 + i as u64);
        let agent: Box<dyn Agent> = match seat.algo.as_str() {
            "fcl" => Box::new(FclAgent::new(
                game.clone(),
                i,
                &FclConfig {
                    epsilon,
                    decay,
                    team_seed: mix_seed(seed, 1),
                    params,
                    rate_key: config.learning_rate,
                    sigma: None,
                },
            )?),
            "qlearning" => Box::new(SelfishQAgent::new(
                game,
                i,
                epsilon,
                decay,
                own_seed,
                config.gamma,
                config.learning_rate,
            )?),
            "pg" => Box::new(PgAgent::new(game, i, seat.lr.unwrap_or(0.1), own_seed, config.gamma)?),
            "always_cooperate" => Box::new(FixedAgent::new(game, i, 0, "always_cooperate")?),
            "always_defect" => Box::new(FixedAgent::new(game, i, 1, "always_defect")?),
            "fixed" => {
                let label = seat.action.as_deref().unwrap_or_default();
                let a = game.action_index(i, label)?;
                Box::new(FixedAgent::new(game, i, a, format!("fixed:{label}"))?)
            }
            other => {
                return Err(crate::error::validation(format!("seats[{i}].algo"), format!("unknown algorithm `{other}`")))
            }
        };
        agents.push(agent);
    }
    Ok(agents)
}

/// Plays one run and returns its rows and record.
pub fn run_single(config: &ExperimentConfig, game: &Arc<GameSpec>, run: usize, hash: &str) -> Result<(Vec<ResultRow>, RunRecord)> {
    let start = Instant::now();
    let seed = run_seed(config, run);
    let agents = build_agents(config, game, seed)?;
    let names: Vec<String> = config.seats.iter().map(|s| s.algo.clone()).collect();
    let mut m = Match::new(game.clone(), agents, mix_seed(seed, 2))?;
    let n = game.num_players();
    let mut totals = vec![0.0; n];
    let mut rows = Vec::with_capacity(config.num_stages as usize * n);
    for stage in 0..config.num_stages {
        let rec = m.play_stage()?;
        for seat in 0..n {
            totals[seat] += rec.stage_returns[seat];
            rows.push(ResultRow {
                run,
                stage,
                seat,
                algo: names[seat].clone(),
                stage_return: rec.stage_returns[seat],
                cum_avg: totals[seat] / (stage + 1) as f64,
            });
        }
    }
    let retaliation_events = config
        .seats
        .iter()
        .position(|s| s.algo == "fcl")
        .map(|i| m.agents()[i].defection_log().to_vec())
        .unwrap_or_default();
    let record = RunRecord {
        run,
        config_hash: hash.to_string(),
        seed,
        wall_clock_secs: start.elapsed().as_secs_f64(),
        final_averages: totals.iter().map(|t| t / config.num_stages as f64).collect(),
        retaliation_events,
    };
    Ok((rows, record))
}

/// Runs every seeded match (in parallel across runs) and writes the CSV when
/// the config names an output file.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    let game = Arc::new(config.validate()?);
    let hash = config_hash(config);
    let results: Vec<(Vec<ResultRow>, RunRecord)> = (0..config.num_runs)
        .into_par_iter()
        .map(|run| run_single(config, &game, run, &hash))
        .collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(results.iter().map(|r| r.0.len()).sum());
    let mut records = Vec::with_capacity(results.len());
    for (r, rec) in results {
        rows.extend(r);
        records.push(rec);
    }
    if let Some(path) = &config.output {
        write_csv(path, &rows)?;
    }
    Ok(ExperimentResult { rows, records })
}

/// Writes rows under the header `run,stage,seat,algo,stage_return,cum_avg`.
pub fn write_csv(path: impl AsRef<Path>, rows: &[ResultRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path)?;
    r.deserialize().map(|row| row.map_err(Into::into)).collect()
}
