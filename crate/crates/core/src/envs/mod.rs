//! Bundled games, constructible by name.

pub mod cake;
pub mod grid;
pub mod matrix;

use crate::error::{Error, Result};
use crate::game::GameSpec;

pub use cake::{build_cake_game, cake_rewards, CakeGameDef};
pub use grid::{build_grid_game, CellReward, GridWorldDef};
pub use matrix::{build_matrix_game, MatrixGameDef};

pub const MATRIX_GAMES: [&str; 4] = ["ipd", "aipd", "ich", "rps"];
pub const GRID_GAMES: [&str; 4] = ["grid_pd", "compromise", "coordination", "temptation"];

/// Names accepted by [`build_game`].
pub fn game_names() -> Vec<&'static str> {
    MATRIX_GAMES
        .iter()
        .chain(GRID_GAMES.iter())
        .copied()
        .chain(std::iter::once("cake"))
        .collect()
}

/// Builds a bundled game. `cake` is the three-player cake game; `cakeN` builds
/// it for N players.
pub fn build_game(name: &str) -> Result<GameSpec> {
    let lower = name.to_ascii_lowercase();
    match lower.as_str() {
        n if MATRIX_GAMES.contains(&n) => build_matrix_game(n),
        n if GRID_GAMES.contains(&n) => build_grid_game(n),
        "cake" => build_cake_game(3),
        n => match n.strip_prefix("cake").and_then(|k| k.parse().ok()) {
            Some(k) => build_cake_game(k),
            None => Err(Error::Lookup {
                kind: "game",
                name: name.to_string(),
            }),
        },
    }
}
