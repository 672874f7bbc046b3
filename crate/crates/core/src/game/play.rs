use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{GameSpec, JointAction};
use crate::error::{ensure, Result};
use crate::fcl::DefectionEvent;

/// What an agent sees before choosing an action.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    pub seat: usize,
    pub state: usize,
    pub stage: u64,
    /// Global step clock, counted across stages.
    pub step: u64,
    pub step_in_stage: usize,
}

/// Full-information transition delivered to every agent after each step.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub stage: u64,
    pub step: u64,
    pub step_in_stage: usize,
    pub state: usize,
    pub joint: usize,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub next_state: usize,
    pub absorbing: bool,
    /// Last step of the stage (absorbing state or step budget reached).
    pub stage_end: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryStep {
    pub state: usize,
    pub actions: JointAction,
    pub rewards: Vec<f64>,
    pub next_state: usize,
}

/// One stage game as played.
#[derive(Clone, Debug, PartialEq)]
pub struct StageRecord {
    pub stage_index: u64,
    pub trajectory: Vec<TrajectoryStep>,
    /// Undiscounted sum of the trajectory's reward vectors.
    pub stage_returns: Vec<f64>,
}

/// A player that can take part in a match.
pub trait Agent: Send {
    fn name(&self) -> &str;

    fn act(&mut self, obs: &Observation) -> usize;

    fn observe(&mut self, tr: &Transition);

    /// Reset signal, delivered once the stage is over.
    fn end_stage(&mut self, _record: &StageRecord) {}

    /// Defections this agent has punished so far.
    fn defection_log(&self) -> &[DefectionEvent] {
        &[]
    }
}

impl<A: Agent + ?Sized> Agent for Box<A> {
    fn name(&self) -> &str {
        (**self).name()
    }
    fn act(&mut self, obs: &Observation) -> usize {
        (**self).act(obs)
    }
    fn observe(&mut self, tr: &Transition) {
        (**self).observe(tr)
    }
    fn end_stage(&mut self, record: &StageRecord) {
        (**self).end_stage(record)
    }
    fn defection_log(&self) -> &[DefectionEvent] {
        (**self).defection_log()
    }
}

/// Plays one stage game.
///
/// The initial state is drawn from the game's initial distribution and steps
/// continue until an absorbing state or the stage budget ends the stage.
/// `clock` is the global step counter and is advanced once per step.
pub fn run_stage<A: Agent>(
    game: &GameSpec,
    agents: &mut [A],
    stage: u64,
    clock: &mut u64,
    rng: &mut ChaCha8Rng,
) -> Result<StageRecord> {
    let n = game.num_players();
    ensure!(agents.len() == n, "{} agents for a {n}-player game", agents.len());
    let mut state = game.sample_initial(rng);
    let mut returns = vec![0.0; n];
    let mut trajectory = Vec::new();
    let mut actions = vec![0; n];
    for k in 0..game.max_stage_steps() {
        for (seat, agent) in agents.iter_mut().enumerate() {
            let a = agent.act(&Observation {
                seat,
                state,
                stage,
                step: *clock,
                step_in_stage: k,
            });
            ensure!(
                a < game.num_actions(seat),
                "agent `{}` in seat {seat} returned action {a}, only {} available",
                agent.name(),
                game.num_actions(seat)
            );
            actions[seat] = a;
        }
        let joint = game.joint().encode(&actions);
        let out = game.step(state, joint, k, rng)?;
        for (r, x) in returns.iter_mut().zip(out.rewards) {
            *r += x;
        }
        let tr = Transition {
            stage,
            step: *clock,
            step_in_stage: k,
            state,
            joint,
            actions: actions.clone(),
            rewards: out.rewards.to_vec(),
            next_state: out.next,
            absorbing: out.absorbing,
            stage_end: out.terminal,
        };
        for agent in agents.iter_mut() {
            agent.observe(&tr);
        }
        *clock += 1;
        trajectory.push(TrajectoryStep {
            state,
            actions: JointAction(tr.actions),
            rewards: tr.rewards,
            next_state: tr.next_state,
        });
        state = out.next;
        if out.terminal {
            break;
        }
    }
    let record = StageRecord {
        stage_index: stage,
        trajectory,
        stage_returns: returns,
    };
    for agent in agents.iter_mut() {
        agent.end_stage(&record);
    }
    Ok(record)
}

/// A sequence of stage games between a fixed set of agents.
pub struct Match<A: Agent> {
    game: Arc<GameSpec>,
    agents: Vec<A>,
    rng: ChaCha8Rng,
    clock: u64,
    stage: u64,
}

impl<A: Agent> Match<A> {
    /// `env_seed` drives the environment's own randomness (initial states,
    /// stochastic transitions); agents carry their own streams.
    pub fn new(game: Arc<GameSpec>, agents: Vec<A>, env_seed: u64) -> Result<Self> {
        ensure!(
            agents.len() == game.num_players(),
            "{} agents for a {}-player game",
            agents.len(),
            game.num_players()
        );
        Ok(Self {
            game,
            agents,
            rng: ChaCha8Rng::seed_from_u64(env_seed),
            clock: 0,
            stage: 0,
        })
    }

    pub fn play_stage(&mut self) -> Result<StageRecord> {
        let rec = run_stage(&self.game, &mut self.agents, self.stage, &mut self.clock, &mut self.rng)?;
        self.stage += 1;
        Ok(rec)
    }

    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    pub fn agents(&self) -> &[A] {
        &self.agents
    }

    pub fn agents_mut(&mut self) -> &mut [A] {
        &mut self.agents
    }

    pub fn stages_played(&self) -> u64 {
        self.stage
    }

    pub fn steps_played(&self) -> u64 {
        self.clock
    }
}
