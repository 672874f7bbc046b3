//! Experiment configuration files (TOML).
//!
//! ```toml
//! game = "ipd"              # bundled game name, or `game_file = "path"`
//! num_runs = 20             # default 20
//! num_stages = 2000
//! base_seed = 7             # default 0
//! gamma = 1.0               # default 1
//! retaliation_bonus = 1     # default 1
//! learning_rate = "state_action"   # or "state"; visit counts behind 1/n
//! window = 50               # moving-average window for summaries
//! output = "ipd.csv"        # optional CSV destination
//!
//! [[seats]]                 # one table per player, in seat order
//! algo = "fcl"              # fcl | qlearning | pg | always_defect |
//!                           # always_cooperate | fixed
//! epsilon = 0.5             # exploration for fcl / qlearning
//! decay = 0.9
//!
//! [[seats]]
//! algo = "fixed"
//! action = "D"              # action label for `fixed`
//! ```
//!
//! Unknown keys are rejected. Omitted `epsilon` / `decay` fall back to the
//! game's defaults (0.5 / 0.9 for one-shot games, 1.0 / 0.995 otherwise).

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::envs::build_game;
use crate::error::{validation, Error, Result};
use crate::game::{file, GameSpec};
use crate::learning::RateKey;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeatSpec {
    pub algo: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decay: Option<f64>,
    /// Action label for `fixed` seats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<String>,
    /// Adam step size for `pg` seats.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr: Option<f64>,
}

impl SeatSpec {
    pub fn new(algo: &str) -> Self {
        Self {
            algo: algo.to_string(),
            epsilon: None,
            decay: None,
            action: None,
            lr: None,
        }
    }
}

pub const ALGORITHMS: [&str; 6] = ["fcl", "qlearning", "pg", "always_defect", "always_cooperate", "fixed"];

fn default_runs() -> usize {
    20
}
fn default_gamma() -> f64 {
    1.0
}
fn default_bonus() -> u32 {
    1
}
fn default_window() -> usize {
    50
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub game_file: Option<PathBuf>,
    #[serde(default = "default_runs")]
    pub num_runs: usize,
    pub num_stages: u64,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_bonus")]
    pub retaliation_bonus: u32,
    #[serde(default)]
    pub learning_rate: RateKey,
    #[serde(default = "default_window")]
    pub window: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub seats: Vec<SeatSpec>,
}

impl ExperimentConfig {
    /// A config for a bundled game with default settings.
    pub fn new(game: &str, num_runs: usize, num_stages: u64, seats: Vec<SeatSpec>) -> Self {
        Self {
            game: Some(game.to_string()),
            game_file: None,
            num_runs,
            num_stages,
            base_seed: 0,
            gamma: 1.0,
            retaliation_bonus: 1,
            learning_rate: RateKey::default(),
            window: default_window(),
            output: None,
            seats,
        }
    }

    pub fn load_game(&self) -> Result<GameSpec> {
        match (&self.game, &self.game_file) {
            (Some(name), None) => build_game(name),
            (None, Some(path)) => file::load(path),
            (Some(_), Some(_)) => Err(validation("game", "give either `game` or `game_file`, not both")),
            (None, None) => Err(validation("game", "missing game name")),
        }
    }

    /// Default `(epsilon, decay)` for the game.
    pub fn default_exploration(game: &GameSpec) -> (f64, f64) {
        if game.max_stage_steps() == 1 {
            (0.5, 0.9)
        } else {
            (1.0, 0.995)
        }
    }

    pub fn exploration(&self, game: &GameSpec, seat: usize) -> (f64, f64) {
        let (e, d) = Self::default_exploration(game);
        let s = &self.seats[seat];
        (s.epsilon.unwrap_or(e), s.decay.unwrap_or(d))
    }

    /// Checks field ranges and agreement with the game.
    pub fn validate(&self) -> Result<GameSpec> {
        if self.num_runs < 1 {
            return Err(validation("num_runs", "must be at least 1"));
        }
        if self.num_stages < 1 {
            return Err(validation("num_stages", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(validation("gamma", "must be in [0, 1]"));
        }
        if self.window < 1 {
            return Err(validation("window", "must be at least 1"));
        }
        let game = self.load_game()?;
        if self.seats.len() != game.num_players() {
            return Err(validation(
                "seats",
                format!("{} seats for the {}-player game `{}`", self.seats.len(), game.num_players(), game.name()),
            ));
        }
        let mut fcl_exploration = None;
        for (i, seat) in self.seats.iter().enumerate() {
            if !ALGORITHMS.contains(&seat.algo.as_str()) {
                return Err(validation(format!("seats[{i}].algo"), format!("unknown algorithm `{}`", seat.algo)));
            }
            let (e, d) = self.exploration(&game, i);
            if !(0.0..=1.0).contains(&e) {
                return Err(validation(format!("seats[{i}].epsilon"), "must be in [0, 1]"));
            }
            if !(d > 0.0 && d <= 1.0) {
                return Err(validation(format!("seats[{i}].decay"), "must be in (0, 1]"));
            }
            if seat.algo == "fixed" {
                let label = seat
                    .action
                    .as_deref()
                    .ok_or_else(|| validation(format!("seats[{i}].action"), "required for `fixed`"))?;
                game.action_index(i, label)
                    .map_err(|_| validation(format!("seats[{i}].action"), format!("unknown action `{label}`")))?;
            } else if seat.action.is_some() {
                return Err(validation(format!("seats[{i}].action"), "only valid for `fixed`"));
            }
            if seat.algo.starts_with("always_") && game.num_actions(i) < 2 {
                return Err(validation(format!("seats[{i}].algo"), "needs at least two actions"));
            }
            if let Some(lr) = seat.lr {
                if seat.algo != "pg" || !(lr > 0.0) {
                    return Err(validation(format!("seats[{i}].lr"), "positive step size for `pg` seats only"));
                }
            }
            if seat.algo == "fcl" {
                // The team explores together, so every FCL seat must agree.
                match fcl_exploration {
                    None => fcl_exploration = Some((e, d)),
                    Some(prev) if prev != (e, d) => {
                        return Err(validation(format!("seats[{i}].epsilon"), "FCL seats must share epsilon and decay"));
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(game)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// Parses and validates a config; syntax errors carry the line number.
pub fn parse_config(text: &str) -> Result<ExperimentConfig> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map(|s| text[..s.start.min(text.len())].matches('\n').count() + 1)
            .unwrap_or(0);
        if e.message().starts_with("missing field") {
            let field = e.message().split('`').nth(1).unwrap_or("?").to_string();
            return validation(field, e.message().to_string());
        }
        Error::Parse {
            line,
            msg: e.message().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const IPD: &str = "game = \"ipd\"\nnum_stages = 10\n[[seats]]\nalgo = \"fcl\"\n[[seats]]\nalgo = \"qlearning\"\n";

    #[test]
    fn minimal_config_roundtrips() {
        let c = parse_config(IPD).unwrap();
        assert_eq!(c.num_runs, 20);
        assert_eq!(parse_config(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn missing_game_is_a_validation_error() {
        let text = IPD.replace("game = \"ipd\"\n", "");
        assert!(matches!(parse_config(&text), Err(Error::Validation { field, .. }) if field == "game"));
    }

    #[test]
    fn cake_needs_three_seats() {
        let text = IPD.replace("\"ipd\"", "\"cake\"");
        assert!(matches!(parse_config(&text), Err(Error::Validation { field, .. }) if field == "seats"));
    }

    #[test]
    fn unknown_key_reports_line() {
        let text = format!("{IPD}bogus = 3\n");
        match parse_config(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn fcl_seats_must_share_exploration() {
        let text = "game = \"ipd\"\nnum_stages = 10\n[[seats]]\nalgo = \"fcl\"\nepsilon = 0.2\n[[seats]]\nalgo = \"fcl\"\n";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn fixed_seat_needs_known_action() {
        let text = IPD.replace("algo = \"qlearning\"", "algo = \"fixed\"\naction = \"X\"");
        assert!(parse_config(&text).is_err());
        let text = IPD.replace("algo = \"qlearning\"", "algo = \"fixed\"\naction = \"D\"");
        assert!(parse_config(&text).is_ok());
    }
}
