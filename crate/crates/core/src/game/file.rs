//! Plain-text game description files.
//!
//! One directive per line, `#` starts a comment:
//!
//! ```text
//! name ipd
//! players 2
//! states 1
//! actions 0 C D              # labels for player 0
//! actions 1 C D
//! initial 1                  # one probability per state
//! max_stage_steps 1
//! absorbing 3 4              # optional, any number of lines
//! label 0 start              # optional state label
//! t 0 1 0 1 -3 0             # state joint next prob r_0 .. r_{N-1}
//! symmetry 1 0 | 0 | 0 1     # player map | state map | action map
//! ```
//!
//! Joint-action indices are lexicographic with player 0 most significant.
//! Several `t` lines may share `(state, joint)` to describe a random outcome.

use std::fmt::Write as _;
use std::path::Path;

use super::{GameBuilder, GameSpec, PlayerPermutation, Symmetry};
use crate::error::{Error, Result};

pub fn to_text(game: &GameSpec) -> String {
    let mut out = String::new();
    let n = game.num_players();
    let _ = writeln!(out, "name {}", game.name());
    let _ = writeln!(out, "players {n}");
    let _ = writeln!(out, "states {}", game.num_states());
    for i in 0..n {
        let _ = writeln!(out, "actions {i} {}", game.action_labels(i).join(" "));
    }
    let _ = writeln!(out, "initial {}", join(game.initial_distribution()));
    let _ = writeln!(out, "max_stage_steps {}", game.max_stage_steps());
    let absorbing: Vec<String> = (0..game.num_states())
        .filter(|&s| game.is_absorbing(s))
        .map(|s| s.to_string())
        .collect();
    if !absorbing.is_empty() {
        let _ = writeln!(out, "absorbing {}", absorbing.join(" "));
    }
    for s in 0..game.num_states() {
        let label = game.state_label(s);
        if label != format!("s{s}") {
            let _ = writeln!(out, "label {s} {label}");
        }
    }
    for s in 0..game.num_states() {
        for a in 0..game.num_joint_actions() {
            for o in game.outcomes(s, a) {
                let _ = writeln!(out, "t {s} {a} {} {} {}", o.next, o.prob, join(&o.rewards));
            }
        }
    }
    for g in game.stored_symmetries() {
        let _ = writeln!(
            out,
            "symmetry {} | {} | {}",
            join(g.players.as_slice()),
            join(&g.states),
            join(&g.actions)
        );
    }
    out
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

pub fn save(game: &GameSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, to_text(game))?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<GameSpec> {
    parse(&std::fs::read_to_string(path)?)
}

struct Header {
    name: Option<String>,
    players: Option<usize>,
    states: Option<usize>,
    actions: Vec<Option<Vec<String>>>,
}

pub fn parse(text: &str) -> Result<GameSpec> {
    let lines: Vec<(usize, Vec<&str>)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").split_whitespace().collect::<Vec<_>>()))
        .filter(|(_, w)| !w.is_empty())
        .collect();

    // Sizes come first so the builder can be allocated before transitions.
    let mut h = Header {
        name: None,
        players: None,
        states: None,
        actions: Vec::new(),
    };
    for (line, w) in &lines {
        let err = |msg: &str| Error::Parse {
            line: *line,
            msg: msg.to_string(),
        };
        match w[0] {
            "name" => h.name = Some(w[1..].join(" ")),
            "players" => {
                let n: usize = num(*line, w.get(1))?;
                h.players = Some(n);
                h.actions = vec![None; n];
            }
            "states" => h.states = Some(num(*line, w.get(1))?),
            "actions" => {
                let i: usize = num(*line, w.get(1))?;
                let slot = h
                    .actions
                    .get_mut(i)
                    .ok_or_else(|| err("`actions` before `players` or player out of range"))?;
                *slot = Some(w[2..].iter().map(|s| s.to_string()).collect());
            }
            _ => {}
        }
    }
    let missing = |what: &str| Error::Parse {
        line: 0,
        msg: format!("missing `{what}`"),
    };
    let name = h.name.ok_or_else(|| missing("name"))?;
    let num_states = h.states.ok_or_else(|| missing("states"))?;
    h.players.ok_or_else(|| missing("players"))?;
    let actions: Vec<Vec<String>> = h
        .actions
        .into_iter()
        .enumerate()
        .map(|(i, a)| a.ok_or_else(|| missing(&format!("actions {i}"))))
        .collect::<Result<_>>()?;
    let n = actions.len();
    let nj: usize = actions.iter().map(Vec::len).product();

    let mut b = GameBuilder::new(name, num_states, actions);
    let mut labels: Vec<String> = (0..num_states).map(|s| format!("s{s}")).collect();
    let mut has_labels = false;
    for (line, w) in &lines {
        let line = *line;
        let err = |msg: String| Error::Parse { line, msg };
        match w[0] {
            "name" | "players" | "states" | "actions" => {}
            "initial" => {
                let p: Vec<f64> = w[1..].iter().map(|x| num(line, Some(x))).collect::<Result<_>>()?;
                b.initial(p);
            }
            "max_stage_steps" => {
                b.max_stage_steps(num(line, w.get(1))?);
            }
            "absorbing" => {
                for x in &w[1..] {
                    let s: usize = num(line, Some(x))?;
                    if s >= num_states {
                        return Err(err(format!("absorbing state {s} out of range")));
                    }
                    b.absorbing(s);
                }
            }
            "label" => {
                let s: usize = num(line, w.get(1))?;
                let slot = labels.get_mut(s).ok_or_else(|| err(format!("state {s} out of range")))?;
                *slot = w[2..].join(" ");
                has_labels = true;
            }
            "t" => {
                if w.len() != 5 + n {
                    return Err(err(format!("expected {} fields, found {}", 5 + n, w.len())));
                }
                let s: usize = num(line, w.get(1))?;
                let a: usize = num(line, w.get(2))?;
                let next: usize = num(line, w.get(3))?;
                let prob: f64 = num(line, w.get(4))?;
                if s >= num_states || a >= nj || next >= num_states {
                    return Err(err("index out of range".into()));
                }
                let rewards: Vec<f64> = w[5..].iter().map(|x| num(line, Some(x))).collect::<Result<_>>()?;
                b.outcome(s, a, next, prob, rewards);
            }
            "symmetry" => {
                let parts: Vec<&[&str]> = w[1..].split(|x| *x == "|").collect();
                if parts.len() != 3 {
                    return Err(err("symmetry needs three `|`-separated maps".into()));
                }
                let ints = |p: &[&str]| -> Result<Vec<usize>> { p.iter().map(|x| num(line, Some(x))).collect() };
                let players =
                    PlayerPermutation::new(ints(parts[0])?).map_err(|e| err(e.to_string()))?;
                b.symmetry(Symmetry {
                    players,
                    states: ints(parts[1])?,
                    actions: ints(parts[2])?,
                });
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    if has_labels {
        b.state_labels(labels);
    }
    b.build()
}

fn num<T: std::str::FromStr>(line: usize, tok: Option<&&str>) -> Result<T> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        msg: "missing value".into(),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        msg: format!("cannot parse `{tok}`"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "\
name tiny
players 2
states 1
actions 0 C D
actions 1 C D
initial 1
max_stage_steps 1
t 0 0 0 1 -1 -1
t 0 1 0 1 -3 0
t 0 2 0 1 0 -3
t 0 3 0 1 -2 -2 # trailing comment
symmetry 1 0 | 0 | 0 1
";

    #[test]
    fn parses_and_roundtrips() {
        let g = parse(TINY).unwrap();
        assert_eq!(g.expected_rewards(0, 2), &[0.0, -3.0]);
        let again = parse(&to_text(&g)).unwrap();
        assert_eq!(to_text(&again), to_text(&g));
    }

    #[test]
    fn reports_line_numbers() {
        let bad = TINY.replace("t 0 1 0 1 -3 0", "t 0 1 0 x -3 0");
        match parse(&bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 9),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_directive() {
        assert!(parse(&format!("{TINY}bogus 1\n")).is_err());
    }
}
