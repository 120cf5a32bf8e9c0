//! A malicious expert against a multiplicative-weights forecaster.
//!
//! Two experts advise a forecaster on binary outcomes. One is honest and
//! right with probability `μ`; the other knows every outcome and decides
//! each round whether to lie. This crate computes how much loss the
//! malicious expert can force:
//!
//! * [`model`]: weights, transitions and losses of a single round.
//! * [`dp`]: exact finite-horizon value and optimal policy against
//!   fixed-ε weights, with a brute-force tree oracle.
//! * [`strategy`]: strategies, and the exact value of the two-state
//!   strategy that realises the long-run lower bound.
//! * [`sim`]: seeded Monte Carlo against fixed-ε and adaptive forecasters,
//!   with path-wise regret checks.
//! * [`asymptotics`]: the closed-form limit, its Hamiltonians, the
//!   per-round bounds and a convergence study.
//!
//! The `mwgame` binary exposes these as subcommands.

pub mod asymptotics;
pub mod dp;
pub mod error;
pub mod model;
pub mod output;
pub mod sim;
pub mod stats;
pub mod strategy;

pub use asymptotics::{bounds_report, convergence_study, BoundsReport, ConvergenceRow};
pub use dp::{average_value, brute_force_value, solve, DpSolver, PolicyTable, ValueTable};
pub use error::{Error, Result};
pub use model::{Action, GameParams, HonestOutcome, LatticeState};
pub use sim::{run_batch, run_episode, BatchStats, EpisodeResult, ForecasterKind};
pub use strategy::Strategy;
