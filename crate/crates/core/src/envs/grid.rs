//! Two-player grid worlds with simultaneous moves.
//!
//! A state is the ordered pair of player positions. Players move up, down,
//! left, right or stay; walls and the border block movement, players never
//! share a cell and never swap cells, and two players entering the same empty
//! cell each win it with probability one half. Reaching a cell that pays the
//! player ends the stage.

use std::fmt::Write as _;

use crate::error::{validation, Error, Result};
use crate::game::{labels, GameBuilder, GameSpec, PlayerPermutation, Symmetry};

pub type Cell = (usize, usize);

const UP: usize = 0;
const DOWN: usize = 1;
const LEFT: usize = 2;
const RIGHT: usize = 3;
const STAY: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CellReward {
    /// Pays `value` to `player` only; the other player treats it as plain floor.
    Owner { player: usize, value: f64 },
    /// Pays `value` to whoever reaches it.
    Any(f64),
    /// The player reaching it gets `reacher`, the other gets `other`.
    Split { reacher: f64, other: f64 },
}

impl CellReward {
    fn pays(&self, player: usize) -> bool {
        match *self {
            CellReward::Owner { player: p, .. } => p == player,
            _ => true,
        }
    }

    fn mirrored(&self) -> CellReward {
        match *self {
            CellReward::Owner { player, value } => CellReward::Owner {
                player: 1 - player,
                value,
            },
            other => other,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridWorldDef {
    pub name: String,
    pub height: usize,
    pub width: usize,
    pub walls: Vec<Cell>,
    pub starts: [Cell; 2],
    pub rewards: Vec<(Cell, CellReward)>,
    /// Probability that player 0 wins a contested cell.
    pub contest_p: f64,
    pub max_stage_steps: usize,
}

/// Parses a layout drawn one row per line: `#` wall, `.` floor, `A`/`B`
/// starts, `a`/`b` owner cells, `$` shared cell paying `shared`, `x` cells
/// paying `split`.
fn from_rows(name: &str, rows: &[&str], shared: f64, split: &[(f64, f64)]) -> GridWorldDef {
    let mut def = GridWorldDef {
        name: name.to_string(),
        height: rows.len(),
        width: rows[0].len(),
        walls: Vec::new(),
        starts: [(0, 0), (0, 0)],
        rewards: Vec::new(),
        contest_p: 0.5,
        max_stage_steps: 30,
    };
    for (r, line) in rows.iter().enumerate() {
        for (c, ch) in line.chars().enumerate() {
            match ch {
                '#' => def.walls.push((r, c)),
                'A' => def.starts[0] = (r, c),
                'B' => def.starts[1] = (r, c),
                'a' => def.rewards.push(((r, c), CellReward::Owner { player: 0, value: 100.0 })),
                'b' => def.rewards.push(((r, c), CellReward::Owner { player: 1, value: 100.0 })),
                '$' => def.rewards.push(((r, c), CellReward::Any(shared))),
                d @ '0'..='9' => {
                    let (reacher, other) = split[d as usize - '0' as usize];
                    def.rewards.push(((r, c), CellReward::Split { reacher, other }));
                }
                _ => {}
            }
        }
    }
    def
}

impl GridWorldDef {
    pub fn named(name: &str) -> Result<Self> {
        Ok(match name {
            "grid_pd" => from_rows(name, &["####$####", "a..A.B..b"], 100.0, &[]),
            "compromise" => from_rows(name, &[".#b#.#a#.", "..A...B.."], 0.0, &[]),
            "coordination" => from_rows(name, &["b.a", "...", "A.B"], 0.0, &[]),
            "temptation" => from_rows(
                name,
                &["0AB0", "1..1"],
                0.0,
                &[(20.0, -10.0), (40.0, -20.0)],
            ),
            _ => {
                return Err(Error::Lookup {
                    kind: "grid game",
                    name: name.to_string(),
                })
            }
        })
    }

    fn is_wall(&self, cell: Cell) -> bool {
        self.walls.contains(&cell)
    }

    fn reward_at(&self, cell: Cell) -> Option<CellReward> {
        self.rewards.iter().find(|(c, _)| *c == cell).map(|(_, r)| *r)
    }

    /// Target cell of a move, before interaction with the other player.
    fn target(&self, (r, c): Cell, action: usize) -> Cell {
        let t = match action {
            UP if r > 0 => (r - 1, c),
            DOWN if r + 1 < self.height => (r + 1, c),
            LEFT if c > 0 => (r, c - 1),
            RIGHT if c + 1 < self.width => (r, c + 1),
            _ => (r, c),
        };
        if self.is_wall(t) {
            (r, c)
        } else {
            t
        }
    }

    /// Resolved positions after a simultaneous move, with probabilities.
    pub fn resolve(&self, pos: [Cell; 2], actions: [usize; 2]) -> Vec<([Cell; 2], f64)> {
        let t = [self.target(pos[0], actions[0]), self.target(pos[1], actions[1])];
        if t[0] == t[1] {
            if t[0] == pos[0] {
                return vec![([pos[0], pos[1]], 1.0)];
            }
            if t[1] == pos[1] {
                return vec![([pos[0], pos[1]], 1.0)];
            }
            return vec![
                ([t[0], pos[1]], self.contest_p),
                ([pos[0], t[1]], 1.0 - self.contest_p),
            ];
        }
        if t[0] == pos[1] && t[1] == pos[0] {
            return vec![(pos, 1.0)];
        }
        vec![(t, 1.0)]
    }

    fn pays_someone(&self, pos: [Cell; 2]) -> bool {
        (0..2).any(|i| self.reward_at(pos[i]).is_some_and(|r| r.pays(i)))
    }

    fn rewards_for(&self, pos: [Cell; 2]) -> Vec<f64> {
        let mut out = vec![0.0, 0.0];
        for i in 0..2 {
            match self.reward_at(pos[i]) {
                Some(CellReward::Owner { player, value }) if player == i => out[i] += value,
                Some(CellReward::Any(v)) => out[i] += v,
                Some(CellReward::Split { reacher, other }) => {
                    out[i] += reacher;
                    out[1 - i] += other;
                }
                _ => {}
            }
        }
        out
    }

    fn mirror(&self, (r, c): Cell) -> Cell {
        (r, self.width - 1 - c)
    }

    fn validate(&self) -> Result<()> {
        let inside = |(r, c): Cell| r < self.height && c < self.width;
        if self.starts[0] == self.starts[1] {
            return Err(validation("starts", "start positions must differ"));
        }
        for s in self.starts {
            if !inside(s) || self.is_wall(s) {
                return Err(validation("starts", format!("start {s:?} is outside or a wall")));
            }
        }
        for (c, _) in &self.rewards {
            if !inside(*c) || self.is_wall(*c) {
                return Err(validation("rewards", format!("reward cell {c:?} is outside or a wall")));
            }
        }
        if !(0.0..=1.0).contains(&self.contest_p) {
            return Err(validation("contest_p", "must be a probability"));
        }
        Ok(())
    }

    /// Free cells in row-major order.
    pub fn free_cells(&self) -> Vec<Cell> {
        (0..self.height)
            .flat_map(|r| (0..self.width).map(move |c| (r, c)))
            .filter(|&c| !self.is_wall(c))
            .collect()
    }

    /// Ordered pairs of distinct free cells, in the game's state order.
    pub fn states(&self) -> Vec<[Cell; 2]> {
        let cells = self.free_cells();
        let mut out = Vec::new();
        for &a in &cells {
            for &b in &cells {
                if a != b {
                    out.push([a, b]);
                }
            }
        }
        out
    }

    pub fn build(&self) -> Result<GameSpec> {
        self.validate()?;
        let states = self.states();
        let index = |p: [Cell; 2]| states.iter().position(|s| *s == p).expect("positions form a state");
        let moves = labels(&["up", "down", "left", "right", "stay"]);
        let mut b = GameBuilder::new(self.name.clone(), states.len(), vec![moves.clone(), moves]);
        for (s, &pos) in states.iter().enumerate() {
            if self.pays_someone(pos) {
                b.absorbing(s);
                continue;
            }
            for a0 in 0..5 {
                for a1 in 0..5 {
                    for (next, p) in self.resolve(pos, [a0, a1]) {
                        if p > 0.0 {
                            b.outcome(s, a0 * 5 + a1, index(next), p, self.rewards_for(next));
                        }
                    }
                }
            }
        }
        let mut init = vec![0.0; states.len()];
        init[index(self.starts)] = 1.0;
        b.initial(init)
            .max_stage_steps(self.max_stage_steps)
            .state_labels(
                states
                    .iter()
                    .map(|[a, b]| format!("A{a:?}B{b:?}").replace(' ', ""))
                    .collect(),
            );

        // Left-right mirror with the players' roles exchanged.
        let mirrored_ok = self.contest_p == 0.5
            && self.starts[1] == self.mirror(self.starts[0])
            && self.walls.iter().all(|&w| self.is_wall(self.mirror(w)))
            && self
                .rewards
                .iter()
                .all(|&(c, r)| self.reward_at(self.mirror(c)) == Some(r.mirrored()));
        if mirrored_ok {
            b.symmetry(Symmetry {
                players: PlayerPermutation::new(vec![1, 0])?,
                states: states
                    .iter()
                    .map(|&[a, bb]| index([self.mirror(bb), self.mirror(a)]))
                    .collect(),
                actions: vec![UP, DOWN, RIGHT, LEFT, STAY],
            });
        }
        b.build()
    }

    /// ASCII picture of a state: `#` walls, `$` reward cells, `A`/`B` players.
    pub fn render(&self, pos: [Cell; 2]) -> String {
        let mut out = String::new();
        for r in 0..self.height {
            for c in 0..self.width {
                let ch = if pos[0] == (r, c) {
                    'A'
                } else if pos[1] == (r, c) {
                    'B'
                } else if self.is_wall((r, c)) {
                    '#'
                } else if self.reward_at((r, c)).is_some() {
                    '$'
                } else {
                    '.'
                };
                out.push(ch);
            }
            let _ = writeln!(out);
        }
        out
    }
}

pub fn build_grid_game(name: &str) -> Result<GameSpec> {
    GridWorldDef::named(name)?.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::{run_stage, Agent, Observation, Transition};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    struct Script(Vec<usize>, usize);
    impl Agent for Script {
        fn name(&self) -> &str {
            "script"
        }
        fn act(&mut self, obs: &Observation) -> usize {
            *self.0.get(obs.step_in_stage).unwrap_or(&self.1)
        }
        fn observe(&mut self, _tr: &Transition) {}
    }

    fn play(name: &str, a: Vec<usize>, b: Vec<usize>) -> (usize, Vec<f64>) {
        let g = build_grid_game(name).unwrap();
        let mut agents = [Script(a, STAY), Script(b, STAY)];
        let mut clock = 0;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rec = run_stage(&g, &mut agents, 0, &mut clock, &mut rng).unwrap();
        (rec.trajectory.len(), rec.stage_returns)
    }

    #[test]
    fn both_stay_runs_full_stage() {
        assert_eq!(play("grid_pd", vec![], vec![]), (30, vec![0.0, 0.0]));
    }

    #[test]
    fn grid_pd_walk_to_own_cell() {
        assert_eq!(play("grid_pd", vec![LEFT; 3], vec![]), (3, vec![100.0, 0.0]));
    }

    #[test]
    fn temptation_take_now() {
        assert_eq!(play("temptation", vec![LEFT], vec![]), (1, vec![20.0, -10.0]));
    }

    #[test]
    fn simultaneous_rewards_are_summed() {
        // A takes the left cell, B the right one, in the same step.
        assert_eq!(play("temptation", vec![LEFT], vec![RIGHT]), (1, vec![10.0, 10.0]));
    }

    #[test]
    fn walls_block() {
        let def = GridWorldDef::named("grid_pd").unwrap();
        assert_eq!(def.target((1, 3), UP), (1, 3));
        assert_eq!(def.target((1, 0), LEFT), (1, 0));
        assert_eq!(def.target((1, 4), UP), (0, 4));
    }

    #[test]
    fn swap_and_block_rules() {
        let def = GridWorldDef::named("coordination").unwrap();
        // Adjacent players trying to swap both stay.
        assert_eq!(def.resolve([(1, 0), (1, 1)], [RIGHT, LEFT]), vec![([(1, 0), (1, 1)], 1.0)]);
        // Moving into a cell being vacated is allowed.
        assert_eq!(def.resolve([(1, 0), (1, 1)], [RIGHT, RIGHT]), vec![([(1, 1), (1, 2)], 1.0)]);
        // Moving into a staying player is blocked.
        assert_eq!(def.resolve([(1, 0), (1, 1)], [RIGHT, STAY]), vec![([(1, 0), (1, 1)], 1.0)]);
        // Contest for an empty cell.
        let out = def.resolve([(1, 0), (1, 2)], [RIGHT, LEFT]);
        assert_eq!(out.len(), 2);
        assert_eq!(out[0], ([(1, 1), (1, 2)], 0.5));
    }

    #[test]
    fn owner_cell_is_floor_for_other_player() {
        let def = GridWorldDef::named("compromise").unwrap();
        assert!(!def.pays_someone([(0, 2), (1, 6)]));
        assert!(def.pays_someone([(0, 6), (1, 0)]));
    }

    #[test]
    fn every_layout_builds_with_mirror_symmetry() {
        for name in ["grid_pd", "compromise", "coordination", "temptation"] {
            let g = build_grid_game(name).unwrap();
            assert_eq!(g.stored_symmetries().len(), 1, "{name}");
            assert_eq!(g.max_stage_steps(), 30);
        }
    }
}
