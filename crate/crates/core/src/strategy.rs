//! Malicious-expert strategies and the two-state strategy's exact value.
//!
//! The two-state strategy lies at the starting weight `ρ` and tells the
//! truth at `g(ρ)`. A lie at `ρ` moves to `g(ρ)` when the honest expert is
//! right; the truth at `g(ρ)` moves back to `ρ` when the honest expert is
//! wrong. Both rows of the resulting transition matrix are `(1-μ, μ)`, so
//! the chain is stationary from the second round on.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dp::PolicyTable;
use crate::error::{check_open_unit, Error, Result};
use crate::model::{expected_loss_unchecked, g, Action, GameParams, LatticeState};
use crate::stats::CompensatedSum;

/// A rule mapping `(round, lattice state)` to an action.
#[derive(Debug, Clone)]
pub enum Strategy {
    AlwaysLie,
    AlwaysTruth,
    /// Lie at `k = 0`, tell the truth at `k = 1`.
    TwoState,
    /// Follow a solved DP policy.
    DpPolicy(Arc<PolicyTable>),
    /// Play a fixed open-loop sequence; round `t` uses entry `t - 1`.
    FixedSequence(Arc<[Action]>),
}

impl Strategy {
    pub fn dp_policy(table: PolicyTable) -> Self {
        Strategy::DpPolicy(Arc::new(table))
    }

    pub fn fixed_sequence(actions: impl Into<Arc<[Action]>>) -> Self {
        Strategy::FixedSequence(actions.into())
    }

    /// Token used on the command line and in reports.
    pub fn token(&self) -> &'static str {
        match self {
            Strategy::AlwaysLie => "lie",
            Strategy::AlwaysTruth => "truth",
            Strategy::TwoState => "two-state",
            Strategy::DpPolicy(_) => "dp-policy",
            Strategy::FixedSequence(_) => "fixed-sequence",
        }
    }

    /// Action for round `round` (1-based) at `state`.
    pub fn decide(&self, round: usize, state: LatticeState) -> Result<Action> {
        if round < 1 {
            return Err(Error::domain("rounds are numbered from 1"));
        }
        match self {
            Strategy::AlwaysLie => Ok(Action::Lie),
            Strategy::AlwaysTruth => Ok(Action::Truth),
            Strategy::TwoState => match state.0 {
                0 => Ok(Action::Lie),
                1 => Ok(Action::Truth),
                k => Err(Error::State(format!(
                    "two-state strategy is only defined at k=0 and k=1, got k={k}"
                ))),
            },
            Strategy::DpPolicy(table) => {
                let remaining = remaining_rounds(table.horizon(), round)?;
                table
                    .action(remaining, state.0)
                    .map_err(|e| Error::State(e.to_string()))
            }
            Strategy::FixedSequence(actions) => actions.get(round - 1).copied().ok_or_else(|| {
                Error::State(format!(
                    "fixed sequence has {} actions, round {round} requested",
                    actions.len()
                ))
            }),
        }
    }
}

pub(crate) fn remaining_rounds(horizon: usize, round: usize) -> Result<usize> {
    if round > horizon {
        return Err(Error::State(format!(
            "policy solved for N={horizon} queried at round {round}"
        )));
    }
    Ok(horizon - round + 1)
}

/// Distribution of the two-state chain over `(ρ, g(ρ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainDistribution {
    pub p_rho: f64,
    pub p_grho: f64,
}

impl ChainDistribution {
    pub const START: ChainDistribution = ChainDistribution {
        p_rho: 1.0,
        p_grho: 0.0,
    };

    /// One transition of the chain, applied row by row.
    pub fn advance(self, mu: f64) -> Self {
        // rows: from ρ -> (1-μ, μ); from g(ρ) -> (1-μ, μ)
        ChainDistribution {
            p_rho: self.p_rho * (1.0 - mu) + self.p_grho * (1.0 - mu),
            p_grho: self.p_rho * mu + self.p_grho * mu,
        }
    }
}

/// `π_t` for the chain started at `ρ`: `(1, 0)` at round 1 and `(1-μ, μ)`
/// from round 2 on.
pub fn chain_distribution(t: usize, mu: f64) -> Result<ChainDistribution> {
    check_open_unit("mu", mu)?;
    match t {
        0 => Err(Error::domain("rounds are numbered from 1")),
        1 => Ok(ChainDistribution::START),
        _ => Ok(ChainDistribution {
            p_rho: 1.0 - mu,
            p_grho: mu,
        }),
    }
}

/// Long-run per-round loss of the two-state strategy,
/// `1 - μ + μ(1-μ)(ρ - g(ρ))`.
pub fn two_state_asymptotic(mu: f64, eps: f64, rho: f64) -> Result<f64> {
    check_open_unit("mu", mu)?;
    let drop = rho - g(rho, eps)?;
    Ok(1.0 - mu + mu * (1.0 - mu) * drop)
}

/// Expected cumulative loss of the two-state strategy over `N` rounds from
/// `ρ₀`: a lie at `ρ₀` in round one, then `N - 1` stationary rounds.
pub fn two_state_exact_value(params: &GameParams) -> f64 {
    let GameParams {
        mu,
        eps,
        horizon,
        rho0,
    } = *params;
    let first = expected_loss_unchecked(Action::Lie, rho0, mu);
    let stationary = two_state_asymptotic(mu, eps, rho0).expect("validated params");
    first + (horizon - 1) as f64 * stationary
}

/// Same quantity as [`two_state_exact_value`] accumulated round by round
/// from the propagated distribution `π_t`. Kept as a cross-check.
pub fn two_state_value_by_recursion(params: &GameParams) -> f64 {
    let mu = params.mu;
    let rho = params.rho0;
    let low = g(rho, params.eps).expect("validated params");
    let lie_loss = expected_loss_unchecked(Action::Lie, rho, mu);
    let truth_loss = expected_loss_unchecked(Action::Truth, low, mu);

    let mut total = CompensatedSum::new();
    let mut dist = ChainDistribution::START;
    for _ in 0..params.horizon {
        total.add(dist.p_rho * lie_loss + dist.p_grho * truth_loss);
        dist = dist.advance(mu);
    }
    total.value()
}
