//! Large-horizon limit of the fixed-ε game.
//!
//! In the rescaled log-odds coordinate `x = ln(1/ρ - 1) / ln(1/ε)` the
//! value `v(t, x) ≈ -V(N, ρ)/N` solves a first-order equation
//! `v_t + H_i(x, v_x) = 0` on `Ω₁ = {x > 0}` and `Ω₂ = {x < 0}`, with
//!
//! ```text
//! H₁(p) = max{1-μ-μp, 1-μ+(1-μ)p}
//! H₂(p) = max{1-μp, (1-μ)p}
//! ```
//!
//! and an explicit piecewise-linear solution. At the origin it gives the
//! per-round ceiling `1 - μ²`; the two-state strategy gives the floor.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dp::{DpSolver, DEFAULT_CELL_BUDGET};
use crate::error::{check_open_unit, Error, Result};
use crate::model::{log_odds_nat, logistic_neg, GameParams};
use crate::output::fmt_num;
use crate::strategy::two_state_asymptotic;

/// Points closer than this to a kink line or to `x = 0` are rejected by
/// [`pde_residual`].
pub const KINK_EXCLUSION: f64 = 1e-9;

/// A point of the rescaled domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PdePoint {
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    /// `x > 0`: the malicious expert is the lighter one.
    Omega1,
    /// `x < 0`
    Omega2,
}

/// `x = ln(1/ρ - 1) / ln(1/ε)`.
pub fn log_odds(rho: f64, eps: f64) -> Result<f64> {
    check_open_unit("rho", rho)?;
    check_open_unit("eps", eps)?;
    Ok(log_odds_nat(rho) / -eps.ln())
}

/// `ρ = 1 / (1 + (1/ε)^x)`, inverse of [`log_odds`].
pub fn rho_from_log_odds(x: f64, eps: f64) -> Result<f64> {
    check_open_unit("eps", eps)?;
    Ok(logistic_neg(x * -eps.ln()))
}

/// Closed-form solution
///
/// ```text
/// v(t, x) = -(1-μ)t          if x ≥ (1-μ)t
///         = -(1-μ²)t + μx    if -μt ≤ x ≤ (1-μ)t
///         = -t               if x ≤ -μt
/// ```
pub fn pde_solution(t: f64, x: f64, mu: f64) -> f64 {
    if x >= (1.0 - mu) * t {
        -(1.0 - mu) * t
    } else if x <= -mu * t {
        -t
    } else {
        -(1.0 - mu * mu) * t + mu * x
    }
}

pub fn hamiltonian(region: Region, p: f64, mu: f64) -> f64 {
    match region {
        Region::Omega1 => (1.0 - mu - mu * p).max(1.0 - mu + (1.0 - mu) * p),
        Region::Omega2 => (1.0 - mu * p).max((1.0 - mu) * p),
    }
}

fn check_off_kinks(t: f64, x: f64, mu: f64) -> Result<Region> {
    check_open_unit("mu", mu)?;
    if t.is_nan() || t <= 0.0 {
        return Err(Error::domain(format!("residual needs t > 0, got {t}")));
    }
    if (x - (1.0 - mu) * t).abs() < KINK_EXCLUSION || (x + mu * t).abs() < KINK_EXCLUSION {
        return Err(Error::domain(format!("({t}, {x}) lies on a kink line")));
    }
    if x.abs() < KINK_EXCLUSION {
        return Err(Error::domain(format!(
            "({t}, {x}) lies on the interface x = 0"
        )));
    }
    Ok(if x > 0.0 {
        Region::Omega1
    } else {
        Region::Omega2
    })
}

/// `(v_t, v_x)` of the active branch of [`pde_solution`].
fn pde_gradient(t: f64, x: f64, mu: f64) -> (f64, f64) {
    if x > (1.0 - mu) * t {
        (-(1.0 - mu), 0.0)
    } else if x < -mu * t {
        (-1.0, 0.0)
    } else {
        (-(1.0 - mu * mu), mu)
    }
}

/// `v_t + H_i(x, v_x)` with analytic derivatives of the closed form.
pub fn pde_residual(t: f64, x: f64, mu: f64) -> Result<f64> {
    let region = check_off_kinks(t, x, mu)?;
    let (vt, vx) = pde_gradient(t, x, mu);
    Ok(vt + hamiltonian(region, vx, mu))
}

/// Central-difference variant of [`pde_residual`], for cross-checking.
/// `h` must stay below the distance to the nearest kink.
pub fn pde_residual_fd(t: f64, x: f64, mu: f64, h: f64) -> Result<f64> {
    let region = check_off_kinks(t, x, mu)?;
    let vt = (pde_solution(t + h, x, mu) - pde_solution(t - h, x, mu)) / (2.0 * h);
    let vx = (pde_solution(t, x + h, mu) - pde_solution(t, x - h, mu)) / (2.0 * h);
    Ok(vt + hamiltonian(region, vx, mu))
}

/// Maximiser of the interface problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentialMax {
    pub value: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub c: f64,
}

/// Grid search for the tangential Hamiltonian
///
/// ```text
/// max  c(1-μ) + (1-c)α₂
/// s.t. c(α₁+μ-1) + (1-c)(α₂+μ-1) = 0,   α₁, α₂, c ∈ [0, 1]
/// ```
///
/// `α₁, α₂` run over `resolution` equally spaced nodes of `[0, 1]`; for each
/// pair the constraint fixes `c`, and pairs with `c ∉ [0, 1]` are skipped.
/// When `α₁ = α₂` the constraint holds for every `c` iff `α₂ = 1-μ`, and
/// the objective is then `1-μ` regardless of `c`.
pub fn tangential_hamiltonian(mu: f64, resolution: usize) -> Result<TangentialMax> {
    check_open_unit("mu", mu)?;
    if resolution < 2 {
        return Err(Error::domain("grid resolution must be at least 2"));
    }
    let node = |i: usize| i as f64 / (resolution - 1) as f64;
    let objective = |a2: f64, c: f64| c * (1.0 - mu) + (1.0 - c) * a2;
    let tol = 1e-12;

    let mut best: Option<TangentialMax> = None;
    for i in 0..resolution {
        let a1 = node(i);
        for j in 0..resolution {
            let a2 = node(j);
            let c = if i == j {
                if (a2 - (1.0 - mu)).abs() > tol {
                    continue;
                }
                0.0
            } else {
                let c = (1.0 - mu - a2) / (a1 - a2);
                if !(-tol..=1.0 + tol).contains(&c) {
                    continue;
                }
                c.clamp(0.0, 1.0)
            };
            let value = objective(a2, c);
            if best.is_none_or(|b| value > b.value) {
                best = Some(TangentialMax {
                    value,
                    alpha1: a1,
                    alpha2: a2,
                    c,
                });
            }
        }
    }
    best.ok_or_else(|| Error::domain("no feasible grid node"))
}

/// Closed-form per-round bounds for one parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub mu: f64,
    pub eps: f64,
    pub rho: f64,
    /// Long-run value of the two-state strategy.
    pub lower: f64,
    /// `1 - μ²`.
    pub upper: f64,
    /// `-v(1, 0)`.
    pub pde_value_at_origin: f64,
}

pub fn bounds_report(mu: f64, eps: f64, rho: f64) -> Result<BoundsReport> {
    let lower = two_state_asymptotic(mu, eps, rho)?;
    check_open_unit("eps", eps)?;
    Ok(BoundsReport {
        mu,
        eps,
        rho,
        lower,
        upper: 1.0 - mu * mu,
        pde_value_at_origin: -pde_solution(1.0, 0.0, mu),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub horizon: usize,
    pub avg_value: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
}

/// Solves the DP at each horizon and reports `V(N, ρ₀)/N` beside the
/// asymptotic bounds. Horizons must be strictly increasing. Rows are solved
/// in parallel and returned in input order.
pub fn convergence_study(
    mu: f64,
    eps: f64,
    rho0: f64,
    horizons: &[usize],
) -> Result<Vec<ConvergenceRow>> {
    convergence_study_with(mu, eps, rho0, horizons, DEFAULT_CELL_BUDGET)
}

pub fn convergence_study_with(
    mu: f64,
    eps: f64,
    rho0: f64,
    horizons: &[usize],
    cell_budget: usize,
) -> Result<Vec<ConvergenceRow>> {
    if horizons.is_empty() {
        return Err(Error::domain("no horizons given"));
    }
    if horizons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("horizons must be strictly increasing"));
    }
    let base = GameParams::new(mu, eps, horizons[0], rho0)?;
    let report = bounds_report(mu, eps, rho0)?;
    let solver = DpSolver::new().value_only().with_cell_budget(cell_budget);
    horizons
        .par_iter()
        .map(|&n| {
            let params = base.with_horizon(n)?;
            let value = solver.solve(&params)?.values.start_value();
            Ok(ConvergenceRow {
                horizon: n,
                avg_value: value / n as f64,
                lower_bound: report.lower,
                upper_bound: report.upper,
            })
        })
        .collect()
}

/// Writes `N,avg_value,lower_bound,upper_bound,mu,eps,rho0` rows.
pub fn write_convergence_csv<W: std::io::Write>(
    mut out: W,
    rows: &[ConvergenceRow],
    mu: f64,
    eps: f64,
    rho0: f64,
    full_precision: bool,
) -> std::io::Result<()> {
    writeln!(out, "N,avg_value,lower_bound,upper_bound,mu,eps,rho0")?;
    let f = |x| fmt_num(x, full_precision);
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.horizon,
            f(r.avg_value),
            f(r.lower_bound),
            f(r.upper_bound),
            f(mu),
            f(eps),
            f(rho0)
        )?;
    }
    Ok(())
}

/// Summary of a residual sweep at random off-kink points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ResidualSweep {
    pub samples: usize,
    pub max_abs_residual: f64,
}

/// Evaluates [`pde_residual`] at `samples` points drawn uniformly from
/// `(0, 2] × [-2, 2]`, redrawing any point inside the exclusion zone.
pub fn residual_sweep(mu: f64, samples: usize, seed: u64) -> Result<ResidualSweep> {
    check_open_unit("mu", mu)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0_f64;
    let mut taken = 0;
    while taken < samples {
        let t = 2.0 * (1.0 - rng.random::<f64>());
        let x = 4.0 * rng.random::<f64>() - 2.0;
        match pde_residual(t, x, mu) {
            Ok(r) => {
                worst = worst.max(r.abs());
                taken += 1;
            }
            Err(_) => continue,
        }
    }
    Ok(ResidualSweep {
        samples,
        max_abs_residual: worst,
    })
}
