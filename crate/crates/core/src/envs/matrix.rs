//! Two-player one-shot matrix games, each played as a 1-step stage.

use crate::error::{Error, Result};
use crate::game::{labels, GameBuilder, GameSpec, PlayerPermutation, Symmetry};

/// Payoff table of a two-player matrix game, indexed `[row][column]`.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixGameDef {
    pub name: String,
    pub actions: Vec<String>,
    pub payoffs: Vec<Vec<(f64, f64)>>,
}

impl MatrixGameDef {
    pub fn named(name: &str) -> Result<Self> {
        let (actions, payoffs): (&[&str], Vec<Vec<(f64, f64)>>) = match name {
            "ipd" => (
                &["C", "D"],
                vec![vec![(-1.0, -1.0), (-3.0, 0.0)], vec![(0.0, -3.0), (-2.0, -2.0)]],
            ),
            "aipd" => (
                &["C", "D"],
                vec![vec![(-1.0, -1.0), (-3.0, 10.0)], vec![(10.0, -3.0), (-2.0, -2.0)]],
            ),
            "ich" => (
                &["Swerve", "Straight"],
                vec![vec![(2.0, 2.0), (1.0, 3.0)], vec![(3.0, 1.0), (0.0, 0.0)]],
            ),
            "rps" => (
                &["R", "P", "S"],
                vec![
                    vec![(0.0, 0.0), (-1.0, 1.0), (1.0, -1.0)],
                    vec![(1.0, -1.0), (0.0, 0.0), (-1.0, 1.0)],
                    vec![(-1.0, 1.0), (1.0, -1.0), (0.0, 0.0)],
                ],
            ),
            _ => {
                return Err(Error::Lookup {
                    kind: "matrix game",
                    name: name.to_string(),
                })
            }
        };
        Ok(Self {
            name: name.to_string(),
            actions: labels(actions),
            payoffs,
        })
    }

    pub fn build(&self) -> Result<GameSpec> {
        let k = self.actions.len();
        let mut b = GameBuilder::new(self.name.clone(), 1, vec![self.actions.clone(), self.actions.clone()]);
        for (r, row) in self.payoffs.iter().enumerate() {
            for (c, &(x, y)) in row.iter().enumerate() {
                b.outcome(0, r * k + c, 0, 1.0, vec![x, y]);
            }
        }
        b.max_stage_steps(1)
            .symmetry(Symmetry::identity_maps(PlayerPermutation::new(vec![1, 0])?, 1, k));
        b.build()
    }
}

pub fn build_matrix_game(name: &str) -> Result<GameSpec> {
    MatrixGameDef::named(name)?.build()
}
