//! Primitive quantities of the two-expert game.
//!
//! Expert 1 is malicious: it sees the outcome and either tells the truth or
//! lies. Expert 2 is honest and is right with probability `mu`. The
//! forecaster predicts the weighted average of the two and pays absolute
//! loss. Only the malicious weight `rho = p¹` is tracked; the honest weight
//! is `1 - rho`.
//!
//! Under the fixed-ε multiplicative-weights rule the malicious weight only
//! moves by whole steps in log-odds space, so every reachable weight is
//! indexed by an integer [`LatticeState`].

use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};

/// Validated parameters of one game instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    /// Accuracy of the honest expert.
    pub mu: f64,
    /// Multiplicative-weights penalty factor.
    pub eps: f64,
    /// Number of rounds `N`.
    pub horizon: usize,
    /// Initial weight of the malicious expert.
    pub rho0: f64,
}

impl GameParams {
    pub fn new(mu: f64, eps: f64, horizon: usize, rho0: f64) -> Result<Self> {
        check_open_unit("mu", mu)?;
        check_open_unit("eps", eps)?;
        check_open_unit("rho0", rho0)?;
        if horizon < 1 {
            return Err(Error::domain("horizon must be at least 1"));
        }
        Ok(Self {
            mu,
            eps,
            horizon,
            rho0,
        })
    }

    /// Same parameters with a different horizon.
    pub fn with_horizon(self, horizon: usize) -> Result<Self> {
        Self::new(self.mu, self.eps, horizon, self.rho0)
    }

    /// `ln(1/ε)`, the log-odds length of one lattice step.
    pub fn step_log_odds(&self) -> f64 {
        -self.eps.ln()
    }

    /// `ln(1/ρ₀ - 1)`, the log-odds of the starting weight.
    pub fn start_log_odds(&self) -> f64 {
        log_odds_nat(self.rho0)
    }
}

/// Validates a raw parameter tuple. Signed horizons are accepted so that
/// negative input is reported as a domain error rather than a parse error.
pub fn validate_params(mu: f64, eps: f64, horizon: i64, rho0: f64) -> Result<GameParams> {
    if horizon < 1 {
        return Err(Error::domain(format!(
            "horizon must be at least 1, got {horizon}"
        )));
    }
    GameParams::new(mu, eps, horizon as usize, rho0)
}

/// What the malicious expert reports in a round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    Truth,
    Lie,
}

impl Action {
    pub fn as_str(self) -> &'static str {
        match self {
            Action::Truth => "T",
            Action::Lie => "L",
        }
    }
}

/// Whether the honest expert's prediction matched the outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HonestOutcome {
    Correct,
    Wrong,
}

impl HonestOutcome {
    pub fn as_str(self) -> &'static str {
        match self {
            HonestOutcome::Correct => "correct",
            HonestOutcome::Wrong => "wrong",
        }
    }
}

/// Integer log-odds offset from the starting weight, in units of `ln(1/ε)`.
///
/// Larger `k` means a lighter malicious expert: `ρ(k+1) = g(ρ(k))`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeState(pub i64);

impl LatticeState {
    pub const START: LatticeState = LatticeState(0);

    pub fn index(self) -> i64 {
        self.0
    }
}

/// `1 / (1 + e^z)` without overflow for large `|z|`.
pub(crate) fn logistic_neg(z: f64) -> f64 {
    if z > 0.0 {
        let e = (-z).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + z.exp())
    }
}

/// Natural log-odds `ln(1/ρ - 1) = ln(1-ρ) - ln ρ`.
pub(crate) fn log_odds_nat(rho: f64) -> f64 {
    (-rho).ln_1p() - rho.ln()
}

/// Malicious weight after a round in which it lied and the honest expert
/// was correct.
pub fn g(rho: f64, eps: f64) -> Result<f64> {
    check_open_unit("rho", rho)?;
    check_open_unit("eps", eps)?;
    Ok(1.0 / (1.0 + (1.0 / rho - 1.0) / eps))
}

/// Malicious weight after a round in which it told the truth and the honest
/// expert was wrong. Inverse of [`g`].
pub fn g_inv(rho: f64, eps: f64) -> Result<f64> {
    check_open_unit("rho", rho)?;
    check_open_unit("eps", eps)?;
    Ok(1.0 / (1.0 + (1.0 / rho - 1.0) * eps))
}

/// Weight at lattice index `k`: `ρ(k) = 1 / (1 + (1/ρ₀ - 1)·ε^(-k))`.
///
/// Evaluated in log-odds, so very large `|k|` underflows gracefully towards
/// 0 or 1 instead of producing NaN.
pub fn rho_of_index(k: i64, params: &GameParams) -> f64 {
    logistic_neg(params.start_log_odds() + k as f64 * params.step_log_odds())
}

/// Realised forecaster loss for one round.
pub fn round_loss(action: Action, outcome: HonestOutcome, rho: f64) -> Result<f64> {
    check_open_unit("rho", rho)?;
    Ok(round_loss_unchecked(action, outcome, rho))
}

pub(crate) fn round_loss_unchecked(action: Action, outcome: HonestOutcome, rho: f64) -> f64 {
    match (action, outcome) {
        (Action::Lie, HonestOutcome::Correct) => rho,
        (Action::Lie, HonestOutcome::Wrong) => 1.0,
        (Action::Truth, HonestOutcome::Correct) => 0.0,
        (Action::Truth, HonestOutcome::Wrong) => 1.0 - rho,
    }
}

/// Forecaster loss for one round, averaged over the honest expert's coin.
pub fn expected_loss(action: Action, rho: f64, mu: f64) -> Result<f64> {
    check_open_unit("rho", rho)?;
    check_open_unit("mu", mu)?;
    Ok(expected_loss_unchecked(action, rho, mu))
}

pub(crate) fn expected_loss_unchecked(action: Action, rho: f64, mu: f64) -> f64 {
    match action {
        Action::Lie => 1.0 - mu + mu * rho,
        Action::Truth => (1.0 - mu) * (1.0 - rho),
    }
}

/// Lattice transition of the fixed-ε rule.
pub fn step(state: LatticeState, action: Action, outcome: HonestOutcome) -> LatticeState {
    match (action, outcome) {
        (Action::Lie, HonestOutcome::Correct) => LatticeState(state.0 + 1),
        (Action::Truth, HonestOutcome::Wrong) => LatticeState(state.0 - 1),
        _ => state,
    }
}
