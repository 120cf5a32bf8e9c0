//! Backward induction for the malicious expert's value against fixed-ε
//! multiplicative weights.
//!
//! `V(t, k)` is the largest expected cumulative forecaster loss the
//! malicious expert can force with `t` rounds left from lattice state `k`:
//!
//! ```text
//! V(t+1, k) = max{ (1-μ+μρ) + μ·V(t, k+1) + (1-μ)·V(t, k),      // lie
//!                  (1-μ)(1-ρ) + (1-μ)·V(t, k-1) + μ·V(t, k) }    // truth
//! V(0, k)   = 0
//! ```
//!
//! Histories that reach the same lattice state share their continuation
//! value, so the recursion only needs the triangle of states reachable from
//! the start: with `t` rounds left after `N - t` have been played,
//! `|k| ≤ N - t`. That is `(N+1)²` cells in total.
//! [`brute_force_value`] evaluates the unmerged history tree and exists to
//! check this merge.

use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::model::{g, g_inv, rho_of_index, round_loss, Action, GameParams, HonestOutcome};
use crate::output::fmt_num;

/// Default limit on `(N+1)²`.
pub const DEFAULT_CELL_BUDGET: usize = 64_000_000;

/// Largest horizon accepted by [`brute_force_value`].
pub const BRUTE_FORCE_MAX_HORIZON: usize = 14;

/// Solved values over the reachable triangle.
#[derive(Debug, Clone)]
pub struct ValueTable {
    params: GameParams,
    /// Lowest level kept; 0 for a full table, `N` for a value-only solve.
    first_level: usize,
    /// `levels[t - first_level][k + (N - t)] = V(t, k)`.
    levels: Vec<Vec<f64>>,
}

/// Maximising action per cell, for `1 ≤ t ≤ N` rounds left.
#[derive(Debug, Clone)]
pub struct PolicyTable {
    params: GameParams,
    /// `actions[t - 1][k + (N - t)]`.
    actions: Vec<Vec<Action>>,
}

/// Output of [`DpSolver::solve`].
#[derive(Debug, Clone)]
pub struct Solution {
    pub values: ValueTable,
    pub policy: Option<PolicyTable>,
}

#[derive(Debug, Clone)]
pub struct DpSolver {
    /// Upper bound on `(N+1)²`; larger problems are refused.
    pub cell_budget: usize,
    /// Keep every level and the argmax action. When off, only two rows are
    /// held in memory and only `V(N, ·)` is returned.
    pub extract_policy: bool,
}

impl Default for DpSolver {
    fn default() -> Self {
        Self::new()
    }
}

impl DpSolver {
    pub fn new() -> Self {
        Self {
            cell_budget: DEFAULT_CELL_BUDGET,
            extract_policy: true,
        }
    }

    pub fn with_cell_budget(mut self, cells: usize) -> Self {
        self.cell_budget = cells;
        self
    }

    pub fn value_only(mut self) -> Self {
        self.extract_policy = false;
        self
    }

    pub fn solve(&self, params: &GameParams) -> Result<Solution> {
        let n = params.horizon;
        let cells = (n as u128 + 1) * (n as u128 + 1);
        if cells > self.cell_budget as u128 {
            return Err(Error::Resource(format!(
                "horizon {n} needs {cells} cells, budget is {}",
                self.cell_budget
            )));
        }

        let mu = params.mu;
        // rho[k + n] = ρ(k) for |k| ≤ n
        let rho: Vec<f64> = (-(n as i64)..=n as i64)
            .map(|k| rho_of_index(k, params))
            .collect();

        let mut levels = Vec::with_capacity(if self.extract_policy { n + 1 } else { 1 });
        let mut actions = Vec::with_capacity(if self.extract_policy { n } else { 0 });
        let mut prev = vec![0.0; 2 * n + 1];

        for t in 0..n {
            // prev holds level t with half-width n - t; build level t + 1.
            let width = n - t - 1;
            let mut next = Vec::with_capacity(2 * width + 1);
            let mut row_actions = Vec::with_capacity(if self.extract_policy {
                2 * width + 1
            } else {
                0
            });
            for j in 0..=2 * width {
                // k = j - width, prev index of k is k + (n - t) = j + 1
                let k = j as i64 - width as i64;
                let r = rho[(k + n as i64) as usize];
                let stay = prev[j + 1];
                let lie = (1.0 - mu + mu * r) + mu * prev[j + 2] + (1.0 - mu) * stay;
                let truth = (1.0 - mu) * (1.0 - r) + (1.0 - mu) * prev[j] + mu * stay;
                // ties go to the lie branch
                if lie >= truth {
                    next.push(lie);
                    if self.extract_policy {
                        row_actions.push(Action::Lie);
                    }
                } else {
                    next.push(truth);
                    if self.extract_policy {
                        row_actions.push(Action::Truth);
                    }
                }
            }
            let done = std::mem::replace(&mut prev, next);
            if self.extract_policy {
                levels.push(done);
                actions.push(row_actions);
            }
        }
        levels.push(prev);

        let first_level = if self.extract_policy { 0 } else { n };
        Ok(Solution {
            values: ValueTable {
                params: *params,
                first_level,
                levels,
            },
            policy: self.extract_policy.then_some(PolicyTable {
                params: *params,
                actions,
            }),
        })
    }
}

/// Full solve with policy extraction under the default cell budget.
pub fn solve(params: &GameParams) -> Result<(ValueTable, PolicyTable)> {
    let sol = DpSolver::new().solve(params)?;
    let policy = sol.policy.expect("policy requested");
    Ok((sol.values, policy))
}

/// `V(N, ρ₀)` using two rolling rows.
pub fn solve_value(params: &GameParams) -> Result<f64> {
    Ok(DpSolver::new()
        .value_only()
        .solve(params)?
        .values
        .start_value())
}

fn triangle_offset(n: usize, t: usize, k: i64) -> Option<usize> {
    if t > n {
        return None;
    }
    let width = (n - t) as i64;
    (k.abs() <= width).then(|| (k + width) as usize)
}

impl ValueTable {
    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn horizon(&self) -> usize {
        self.params.horizon
    }

    /// Levels `t` for which values are stored.
    pub fn stored_levels(&self) -> std::ops::RangeInclusive<usize> {
        self.first_level..=self.params.horizon
    }

    pub fn value_at(&self, t: usize, k: i64) -> Result<f64> {
        let n = self.params.horizon;
        let offset = triangle_offset(n, t, k).ok_or_else(|| {
            Error::Index(format!(
                "(t={t}, k={k}) lies outside the reachable triangle of N={n}"
            ))
        })?;
        if t < self.first_level {
            return Err(Error::Index(format!(
                "level t={t} was not retained (value-only solve keeps t={})",
                self.first_level
            )));
        }
        Ok(self.levels[t - self.first_level][offset])
    }

    /// `V(N, ρ₀)`.
    pub fn start_value(&self) -> f64 {
        *self
            .levels
            .last()
            .and_then(|row| row.first())
            .expect("non-empty table")
    }

    /// Iterates `(t, k, V(t, k))` over the stored cells, level by level.
    pub fn cells(&self) -> impl Iterator<Item = (usize, i64, f64)> + '_ {
        let n = self.params.horizon;
        self.levels.iter().enumerate().flat_map(move |(i, row)| {
            let t = self.first_level + i;
            let width = (n - t) as i64;
            row.iter()
                .enumerate()
                .map(move |(j, &v)| (t, j as i64 - width, v))
        })
    }

    /// Largest deviation between a stored cell and the recursion recomputed
    /// from the stored level below it. Needs a full table.
    pub fn recursion_residual(&self) -> Result<f64> {
        if self.first_level != 0 {
            return Err(Error::Contract(
                "recursion residual needs a full value table".into(),
            ));
        }
        let p = &self.params;
        let mu = p.mu;
        let mut worst = 0.0_f64;
        for t in 0..p.horizon {
            let width = (p.horizon - t - 1) as i64;
            for k in -width..=width {
                let r = rho_of_index(k, p);
                let stay = self.value_at(t, k)?;
                let lie = (1.0 - mu + mu * r) + mu * self.value_at(t, k + 1)? + (1.0 - mu) * stay;
                let truth =
                    (1.0 - mu) * (1.0 - r) + (1.0 - mu) * self.value_at(t, k - 1)? + mu * stay;
                let stored = self.value_at(t + 1, k)?;
                worst = worst.max((stored - lie.max(truth)).abs());
            }
        }
        Ok(worst)
    }
}

/// `V(t, k)` lookup.
pub fn value_at(table: &ValueTable, t: usize, k: i64) -> Result<f64> {
    table.value_at(t, k)
}

/// `V(N, ρ₀) / N`, the per-round value compared against the asymptotic
/// bounds.
pub fn average_value(table: &ValueTable) -> f64 {
    table.start_value() / table.horizon() as f64
}

impl PolicyTable {
    pub fn params(&self) -> &GameParams {
        &self.params
    }

    pub fn horizon(&self) -> usize {
        self.params.horizon
    }

    /// Action with `remaining` rounds left at lattice index `k`.
    pub fn action(&self, remaining: usize, k: i64) -> Result<Action> {
        let n = self.params.horizon;
        if remaining == 0 {
            return Err(Error::Index(
                "no action is defined with 0 rounds left".into(),
            ));
        }
        let offset = triangle_offset(n, remaining, k).ok_or_else(|| {
            Error::Index(format!(
                "(t={remaining}, k={k}) lies outside the reachable triangle of N={n}"
            ))
        })?;
        Ok(self.actions[remaining - 1][offset])
    }

    /// Like [`PolicyTable::action`] but `k` is clamped into the triangle.
    /// Used when the state was not produced by the fixed-ε lattice.
    pub fn action_clamped(&self, remaining: usize, k: i64) -> Result<Action> {
        let n = self.params.horizon;
        if remaining == 0 || remaining > n {
            return Err(Error::Index(format!(
                "remaining rounds {remaining} outside 1..={n}"
            )));
        }
        let width = (n - remaining) as i64;
        self.action(remaining, k.clamp(-width, width))
    }
}

/// Writes `t,k,rho,value,action` rows for every stored cell. The action
/// column is empty at `t = 0` or when no policy is given.
pub fn write_table_csv<W: Write>(
    mut out: W,
    values: &ValueTable,
    policy: Option<&PolicyTable>,
    full_precision: bool,
) -> io::Result<()> {
    writeln!(out, "t,k,rho,value,action")?;
    for (t, k, v) in values.cells() {
        let action = match policy {
            Some(p) if t >= 1 => p.action(t, k).map(Action::as_str).unwrap_or(""),
            _ => "",
        };
        writeln!(
            out,
            "{t},{k},{},{},{action}",
            fmt_num(rho_of_index(k, values.params()), full_precision),
            fmt_num(v, full_precision)
        )?;
    }
    Ok(())
}

/// Exact value by exhaustive recursion over the (action × outcome) history
/// tree, with weights carried as floats through `g`/`g⁻¹` and no state
/// merging. Cost is `4^N`.
pub fn brute_force_value(params: &GameParams) -> Result<f64> {
    if params.horizon > BRUTE_FORCE_MAX_HORIZON {
        return Err(Error::Resource(format!(
            "brute force is limited to N <= {BRUTE_FORCE_MAX_HORIZON}, got {}",
            params.horizon
        )));
    }
    tree_value(params.rho0, params.horizon, params.mu, params.eps)
}

fn tree_value(rho: f64, left: usize, mu: f64, eps: f64) -> Result<f64> {
    if left == 0 {
        return Ok(0.0);
    }
    let branch = |action: Action| -> Result<f64> {
        let (after_correct, after_wrong) = match action {
            Action::Lie => (g(rho, eps)?, rho),
            Action::Truth => (rho, g_inv(rho, eps)?),
        };
        let correct = round_loss(action, HonestOutcome::Correct, rho)?
            + tree_value(after_correct, left - 1, mu, eps)?;
        let wrong = round_loss(action, HonestOutcome::Wrong, rho)?
            + tree_value(after_wrong, left - 1, mu, eps)?;
        Ok(mu * correct + (1.0 - mu) * wrong)
    };
    Ok(branch(Action::Lie)?.max(branch(Action::Truth)?))
}
