//! Seeded Monte Carlo play of a malicious strategy against a forecaster.
//!
//! Three forecasters are available:
//!
//! * [`ForecasterKind::FixedMw`] multiplies the erring expert's weight by
//!   `ε`. The engine carries the integer lattice index and derives the
//!   weight from it, so there is no drift over long horizons.
//! * [`ForecasterKind::AdaptiveMw`] is exponential weighting on cumulative
//!   losses with the decreasing rate `η_t = √(8 ln 2 / t)`:
//!   `p¹_t ∝ exp(-η_t · L¹_{t-1})`. For this forecaster the regret
//!   `L̂_N - min(L¹_N, L²_N)` is at most `2√(N ln 2 / 2) + √(ln 2 / 8)` on
//!   every path when both experts start at weight 1/2.
//! * [`ForecasterKind::AdaptiveMwIncremental`] applies the per-round update
//!   `p¹_{t+1} ∝ p¹_t · exp(-η_t · l¹_t)` instead. With a constant rate the
//!   two adaptive forms coincide; with `η_t` decreasing they do not, and the
//!   path-wise bound above does not hold for the incremental form (an
//!   expert that is right early and wrong late keeps its weight too long).
//!
//! Every episode owns a ChaCha8 generator seeded from its episode seed.
//! Batches derive episode seeds from the master seed with SplitMix64, so
//! results do not depend on how episodes are scheduled across threads.

use std::io::{self, Write};

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_open_unit, Error, Result};
use crate::model::{
    log_odds_nat, logistic_neg, rho_of_index, round_loss_unchecked, step, Action, GameParams,
    HonestOutcome, LatticeState,
};
use crate::output::fmt_num;
use crate::stats::{CompensatedSum, RunningStats};
use crate::strategy::{remaining_rounds, Strategy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ForecasterKind {
    /// Fixed-ε multiplicative weights; `ε` is taken from [`GameParams`].
    FixedMw,
    /// Exponential weights on cumulative losses with `η_t = √(8 ln 2 / t)`.
    AdaptiveMw,
    /// Per-round multiplicative update with `η_t = √(8 ln 2 / t)`.
    AdaptiveMwIncremental,
}

impl ForecasterKind {
    pub fn token(self) -> &'static str {
        match self {
            ForecasterKind::FixedMw => "mw",
            ForecasterKind::AdaptiveMw => "adaptive",
            ForecasterKind::AdaptiveMwIncremental => "adaptive-incremental",
        }
    }

    pub fn is_adaptive(self) -> bool {
        !matches!(self, ForecasterKind::FixedMw)
    }
}

/// `η_t = √(8 ln 2 / t)`.
pub fn eta_schedule(t: usize) -> Result<f64> {
    if t < 1 {
        return Err(Error::domain("learning-rate schedule starts at t = 1"));
    }
    Ok((8.0 * std::f64::consts::LN_2 / t as f64).sqrt())
}

/// One exponential-weights step on the malicious weight `p1` given binary
/// losses of both experts.
pub fn adaptive_weight_update(p1: f64, loss1: u8, loss2: u8, eta: f64) -> Result<f64> {
    check_open_unit("p1", p1)?;
    if loss1 > 1 || loss2 > 1 {
        return Err(Error::domain("expert losses must be 0 or 1"));
    }
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain(format!("eta must be positive, got {eta}")));
    }
    let a = p1 * (-eta * loss1 as f64).exp();
    let b = (1.0 - p1) * (-eta * loss2 as f64).exp();
    Ok(a / (a + b))
}

/// Path-wise regret bound `2√(n ln 2 / 2) + √(ln 2 / 8)` of the adaptive
/// forecaster.
pub fn regret_bound(n: usize) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    2.0 * (n as f64 * ln2 / 2.0).sqrt() + (ln2 / 8.0).sqrt()
}

/// SplitMix64 finaliser.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of episode `index` within a batch.
pub fn episode_seed(master_seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ index)
}

/// Checks that a strategy can be played against a forecaster before any
/// episode starts.
pub fn validate_config(
    forecaster: ForecasterKind,
    strategy: &Strategy,
    params: &GameParams,
) -> Result<()> {
    match strategy {
        Strategy::TwoState if forecaster.is_adaptive() => Err(Error::Contract(
            "the two-state strategy needs the fixed-eps lattice; use --forecaster mw".into(),
        )),
        Strategy::DpPolicy(table) if table.params() != params => Err(Error::Contract(format!(
            "dp policy was solved for {:?}, game uses {:?}",
            table.params(),
            params
        ))),
        Strategy::FixedSequence(actions) if actions.len() < params.horizon => {
            Err(Error::Contract(format!(
                "fixed sequence has {} actions, horizon is {}",
                actions.len(),
                params.horizon
            )))
        }
        _ => Ok(()),
    }
}

/// One simulated game.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub forecaster: ForecasterKind,
    pub params: GameParams,
    pub seed: u64,
    pub actions: Vec<Action>,
    pub outcomes: Vec<HonestOutcome>,
    /// Forecaster loss per round.
    pub losses: Vec<f64>,
    /// Malicious weight entering each round; the last entry is the weight
    /// after round `N`, so the length is `N + 1`.
    pub weights: Vec<f64>,
    /// Lattice index matching `weights` under fixed-ε weights.
    pub lattice: Option<Vec<i64>>,
    /// Cumulative forecaster loss `L̂_N`.
    pub hat_l: f64,
    /// Cumulative malicious-expert loss `L¹_N`.
    pub l1: u64,
    /// Cumulative honest-expert loss `L²_N`.
    pub l2: u64,
}

impl EpisodeResult {
    pub fn average_loss(&self) -> f64 {
        self.hat_l / self.params.horizon as f64
    }

    pub fn final_weight(&self) -> f64 {
        *self.weights.last().expect("weights hold N + 1 entries")
    }

    /// Per-round trace with columns `t,action,outcome,rho,loss,hat_L,L1,L2`.
    pub fn write_log_csv<W: Write>(&self, mut out: W, full_precision: bool) -> io::Result<()> {
        writeln!(out, "t,action,outcome,rho,loss,hat_L,L1,L2")?;
        let mut hat_l = CompensatedSum::new();
        let (mut l1, mut l2) = (0u64, 0u64);
        for (i, ((&a, &o), &loss)) in self
            .actions
            .iter()
            .zip(&self.outcomes)
            .zip(&self.losses)
            .enumerate()
        {
            hat_l.add(loss);
            l1 += u64::from(a == Action::Lie);
            l2 += u64::from(o == HonestOutcome::Wrong);
            writeln!(
                out,
                "{},{},{},{},{},{},{l1},{l2}",
                i + 1,
                a.as_str(),
                o.as_str(),
                fmt_num(self.weights[i], full_precision),
                fmt_num(loss, full_precision),
                fmt_num(hat_l.value(), full_precision),
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Round {
    action: Action,
    outcome: HonestOutcome,
    weight: f64,
    k: Option<i64>,
    loss: f64,
}

#[derive(Debug, Clone, Copy)]
struct Totals {
    hat_l: f64,
    l1: u64,
    l2: u64,
    final_weight: f64,
    final_k: Option<i64>,
}

enum Weights {
    Lattice(LatticeState),
    /// `z = ln(1/p¹ - 1)`
    LogOdds(f64),
}

fn play(
    forecaster: ForecasterKind,
    strategy: &Strategy,
    params: &GameParams,
    seed: u64,
    mut on_round: impl FnMut(Round),
) -> Result<Totals> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mu = params.mu;
    let z0 = log_odds_nat(params.rho0);
    let lattice_step = params.step_log_odds();

    let mut weights = match forecaster {
        ForecasterKind::FixedMw => Weights::Lattice(LatticeState::START),
        _ => Weights::LogOdds(z0),
    };
    let mut hat_l = CompensatedSum::new();
    let (mut l1, mut l2) = (0u64, 0u64);

    for t in 1..=params.horizon {
        let (weight, k) = match &mut weights {
            Weights::Lattice(state) => (rho_of_index(state.0, params), Some(state.0)),
            Weights::LogOdds(z) => {
                if forecaster == ForecasterKind::AdaptiveMw {
                    *z = z0 + eta_schedule(t)? * (l1 as f64 - l2 as f64);
                }
                (logistic_neg(*z), None)
            }
        };

        let action = match (k, strategy) {
            (Some(k), _) => strategy.decide(t, LatticeState(k))?,
            // off-lattice: nearest lattice index, clamped into the policy's triangle
            (None, Strategy::DpPolicy(table)) => {
                let z = match weights {
                    Weights::LogOdds(z) => z,
                    Weights::Lattice(_) => unreachable!(),
                };
                let nearest = ((z - z0) / lattice_step).round() as i64;
                table.action_clamped(remaining_rounds(table.horizon(), t)?, nearest)?
            }
            (None, _) => strategy.decide(t, LatticeState::START)?,
        };
        let outcome = if rng.random::<f64>() < mu {
            HonestOutcome::Correct
        } else {
            HonestOutcome::Wrong
        };
        let loss = round_loss_unchecked(action, outcome, weight);
        let lie = u64::from(action == Action::Lie);
        let wrong = u64::from(outcome == HonestOutcome::Wrong);

        hat_l.add(loss);
        l1 += lie;
        l2 += wrong;
        on_round(Round {
            action,
            outcome,
            weight,
            k,
            loss,
        });

        match &mut weights {
            Weights::Lattice(state) => *state = step(*state, action, outcome),
            Weights::LogOdds(z) => {
                if forecaster == ForecasterKind::AdaptiveMwIncremental {
                    *z += eta_schedule(t)? * (lie as f64 - wrong as f64);
                }
            }
        }
    }

    let (final_weight, final_k) = match weights {
        Weights::Lattice(state) => (rho_of_index(state.0, params), Some(state.0)),
        Weights::LogOdds(z) => {
            let z = if forecaster == ForecasterKind::AdaptiveMw {
                z0 + eta_schedule(params.horizon + 1)? * (l1 as f64 - l2 as f64)
            } else {
                z
            };
            (logistic_neg(z), None)
        }
    };
    Ok(Totals {
        hat_l: hat_l.value(),
        l1,
        l2,
        final_weight,
        final_k,
    })
}

/// Plays one episode. Deterministic in all arguments.
pub fn run_episode(
    forecaster: ForecasterKind,
    strategy: &Strategy,
    params: &GameParams,
    seed: u64,
) -> Result<EpisodeResult> {
    validate_config(forecaster, strategy, params)?;
    let n = params.horizon;
    let mut actions = Vec::with_capacity(n);
    let mut outcomes = Vec::with_capacity(n);
    let mut losses = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n + 1);
    let mut lattice = Vec::with_capacity(n + 1);
    let totals = play(forecaster, strategy, params, seed, |r| {
        actions.push(r.action);
        outcomes.push(r.outcome);
        losses.push(r.loss);
        weights.push(r.weight);
        if let Some(k) = r.k {
            lattice.push(k);
        }
    })?;
    weights.push(totals.final_weight);
    let lattice = totals.final_k.map(|k| {
        lattice.push(k);
        lattice
    });
    Ok(EpisodeResult {
        forecaster,
        params: *params,
        seed,
        actions,
        outcomes,
        losses,
        weights,
        lattice,
        hat_l: totals.hat_l,
        l1: totals.l1,
        l2: totals.l2,
    })
}

/// Result of [`check_regret_invariant`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegretCheck {
    pub regret: f64,
    /// `min(L¹, L²) + bound - L̂`; negative on violation.
    pub slack: f64,
    pub violated: bool,
}

fn regret_check(hat_l: f64, l1: u64, l2: u64, n: usize) -> RegretCheck {
    let regret = hat_l - l1.min(l2) as f64;
    let slack = regret_bound(n) - regret;
    RegretCheck {
        regret,
        slack,
        violated: slack < 0.0,
    }
}

fn regret_check_applies(forecaster: ForecasterKind, params: &GameParams) -> Result<()> {
    if !forecaster.is_adaptive() {
        return Err(Error::Contract(
            "the regret bound is stated for the adaptive forecaster only".into(),
        ));
    }
    if params.rho0 != 0.5 {
        return Err(Error::Contract(format!(
            "the regret bound assumes equal initial weights, rho0 = {}",
            params.rho0
        )));
    }
    Ok(())
}

/// Tests `L̂_N ≤ min(L¹_N, L²_N) + regret_bound(N)` on one episode.
pub fn check_regret_invariant(episode: &EpisodeResult) -> Result<RegretCheck> {
    regret_check_applies(episode.forecaster, &episode.params)?;
    Ok(regret_check(
        episode.hat_l,
        episode.l1,
        episode.l2,
        episode.params.horizon,
    ))
}

/// Aggregate of a batch of episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BatchStats {
    pub replications: usize,
    /// Mean over episodes of `L̂_N / N`.
    pub mean_avg_loss: f64,
    /// Sample standard deviation over `√replications`; 0 for one episode.
    pub stderr: f64,
    /// Episodes breaking the regret bound. Always 0 when the bound does
    /// not apply (fixed-ε weights or unequal initial weights).
    pub regret_violations: usize,
    /// Smallest regret slack seen, when the bound applies.
    pub min_regret_slack: Option<f64>,
}

/// Plays `replications` episodes; episode `i` uses
/// `episode_seed(master_seed, i)`. Episodes run in parallel; the fold is
/// in index order.
pub fn run_batch(
    forecaster: ForecasterKind,
    strategy: &Strategy,
    params: &GameParams,
    replications: usize,
    master_seed: u64,
) -> Result<BatchStats> {
    if replications < 1 {
        return Err(Error::domain("a batch needs at least one replication"));
    }
    validate_config(forecaster, strategy, params)?;
    let check_regret = regret_check_applies(forecaster, params).is_ok();
    let n = params.horizon;

    let per_episode: Vec<(f64, Option<RegretCheck>)> = (0..replications as u64)
        .into_par_iter()
        .map(|i| {
            let t = play(
                forecaster,
                strategy,
                params,
                episode_seed(master_seed, i),
                |_| {},
            )?;
            let check = check_regret.then(|| regret_check(t.hat_l, t.l1, t.l2, n));
            Ok((t.hat_l / n as f64, check))
        })
        .collect::<Result<_>>()?;

    let mut stats = RunningStats::default();
    let mut violations = 0;
    let mut min_slack: Option<f64> = None;
    for (avg, check) in per_episode {
        stats.push(avg);
        if let Some(c) = check {
            violations += usize::from(c.violated);
            min_slack = Some(min_slack.map_or(c.slack, |m| m.min(c.slack)));
        }
    }
    Ok(BatchStats {
        replications,
        mean_avg_loss: stats.mean(),
        stderr: stats.std_err(),
        regret_violations: violations,
        min_regret_slack: min_slack,
    })
}

/// Batch summary as written by `mwgame simulate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchSummary {
    pub forecaster: String,
    pub strategy: String,
    pub mu: f64,
    pub eps: f64,
    pub horizon: usize,
    pub reps: usize,
    pub master_seed: u64,
    pub mean_avg_loss: f64,
    pub stderr: f64,
    pub regret_violations: usize,
}

impl BatchSummary {
    pub fn new(
        forecaster: ForecasterKind,
        strategy: &Strategy,
        params: &GameParams,
        master_seed: u64,
        stats: &BatchStats,
    ) -> Self {
        Self {
            forecaster: forecaster.token().to_string(),
            strategy: strategy.token().to_string(),
            mu: params.mu,
            eps: params.eps,
            horizon: params.horizon,
            reps: stats.replications,
            master_seed,
            mean_avg_loss: stats.mean_avg_loss,
            stderr: stats.stderr,
            regret_violations: stats.regret_violations,
        }
    }
}
