//! Repeated symmetric stochastic games with foolproof cooperative learners.
//!
//! The crate bundles the game model ([`game`]), the benchmark environments
//! ([`envs`]), tabular learning rules ([`learning`]), a matrix-game LP solver
//! ([`solver`]), the cooperative team learner ([`fcl`]), selfish baselines
//! ([`baselines`]), an exact dynamic-programming oracle ([`oracle`]) and an
//! experiment harness ([`harness`]).

pub mod baselines;
pub mod envs;
pub mod error;
pub mod fcl;
pub mod game;
pub mod harness;
pub mod learning;
pub mod oracle;
pub mod solver;

pub use error::{Error, Result};
