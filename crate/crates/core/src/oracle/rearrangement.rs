use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::grid::{spread, variance, QuantileGrid};
use crate::error::{domain, Result};
use crate::rng::seeded;
use crate::scalar::Scalar;

/// Outcome of one rearrangement run. `permutations[j][r]` is the atom of column `j`
/// placed in row `r`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RearrangementResult<T> {
    pub permutations: Vec<Vec<usize>>,
    pub row_sum_spread: T,
    pub row_sum_stddev: T,
    pub iterations: usize,
    pub converged: bool,
    /// Row-sum variance before the first sweep and after each sweep.
    pub variance_trajectory: Vec<T>,
}

impl<T: Scalar> RearrangementResult<T> {
    /// Recomputes the spread from the grid and the stored permutations.
    pub fn replay_spread(&self, grid: &QuantileGrid<T>) -> T {
        spread(&grid.row_sums(&self.permutations))
    }

    /// Whether the variance never increased from one sweep to the next.
    pub fn is_monotone(&self) -> bool {
        self.variance_trajectory.windows(2).all(|w| w[1] <= w[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RaOptions {
    pub max_sweeps: usize,
    pub tol: f64,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for RaOptions {
    fn default() -> Self {
        Self { max_sweeps: 500, tol: 1e-12, restarts: 10, seed: 42 }
    }
}

/// JSON summary of an oracle run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleReport {
    pub m: usize,
    pub n: usize,
    pub spread: f64,
    pub stddev: f64,
    pub iterations: usize,
    pub converged: bool,
    pub restarts: usize,
}

impl OracleReport {
    pub fn new<T: Scalar>(grid: &QuantileGrid<T>, result: &RearrangementResult<T>, restarts: usize) -> Self {
        Self {
            m: grid.m(),
            n: grid.n(),
            spread: result.row_sum_spread.to_f64_lossy(),
            stddev: result.row_sum_stddev.to_f64_lossy(),
            iterations: result.iterations,
            converged: result.converged,
            restarts,
        }
    }
}

fn check_shape<T: Scalar>(grid: &QuantileGrid<T>) -> Result<()> {
    if grid.m() < 2 || grid.n() < 2 {
        return domain(format!("rearrangement needs m >= 2 and n >= 2, got m = {}, n = {}", grid.m(), grid.n()));
    }
    Ok(())
}

/// Rows of column `j` reassigned counter-monotonically to the sum of the other columns:
/// the row with the smallest partial sum receives the largest atom.
fn countermonotone_column<T: Scalar>(grid: &QuantileGrid<T>, perms: &[Vec<usize>], j: usize) -> Vec<usize> {
    let m = grid.m();
    let partial: Vec<T> = (0..m)
        .map(|r| {
            let mut s = T::zero();
            for (k, (col, perm)) in grid.columns().iter().zip(perms).enumerate() {
                if k != j {
                    s += col[perm[r]];
                }
            }
            s
        })
        .collect();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| partial[a].partial_cmp(&partial[b]).unwrap_or(Ordering::Equal).then(a.cmp(&b)));
    let mut column = vec![0; m];
    for (i, &row) in order.iter().enumerate() {
        column[row] = m - 1 - i;
    }
    column
}

/// Rearrangement from explicit starting permutations.
///
/// A column re-sort is kept only when it strictly lowers the row-sum variance, so the
/// trajectory is nonincreasing sweep by sweep. The run stops when a sweep changes
/// nothing, when a sweep improves the variance by less than `tol`, or after `max_sweeps`.
pub fn ra_minimize_from<T: Scalar>(
    grid: &QuantileGrid<T>,
    mut perms: Vec<Vec<usize>>,
    max_sweeps: usize,
    tol: f64,
) -> Result<RearrangementResult<T>> {
    check_shape(grid)?;
    if perms.len() != grid.n() || perms.iter().any(|p| p.len() != grid.m()) {
        return domain("starting permutations do not match the grid shape");
    }
    let tol = T::from_f64_lossy(tol);
    let mut sums = grid.row_sums(&perms);
    let mut var = variance(&sums);
    let mut trajectory = vec![var];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_sweeps {
        iterations += 1;
        let before = var;
        let mut changed = false;
        for j in 0..grid.n() {
            let candidate = countermonotone_column(grid, &perms, j);
            if candidate == perms[j] {
                continue;
            }
            let previous = std::mem::replace(&mut perms[j], candidate);
            let candidate_sums = grid.row_sums(&perms);
            let candidate_var = variance(&candidate_sums);
            if candidate_var < var {
                var = candidate_var;
                sums = candidate_sums;
                changed = true;
            } else {
                perms[j] = previous;
            }
        }
        trajectory.push(var);
        if !changed || before - var < tol {
            converged = true;
            break;
        }
    }
    Ok(RearrangementResult {
        row_sum_spread: spread(&sums),
        row_sum_stddev: var.sqrt(),
        permutations: perms,
        iterations,
        converged,
        variance_trajectory: trajectory,
    })
}

/// Single rearrangement run from the comonotone (all columns sorted) arrangement.
pub fn ra_minimize<T: Scalar>(grid: &QuantileGrid<T>, max_sweeps: usize, tol: f64) -> Result<RearrangementResult<T>> {
    let identity: Vec<usize> = (0..grid.m()).collect();
    ra_minimize_from(grid, vec![identity; grid.n()], max_sweeps, tol)
}

/// Every run of a restarted rearrangement: run 0 starts comonotone, run `k >= 1` starts
/// from columns `2..n` shuffled with seed `opts.seed + k`.
pub fn ra_runs<T: Scalar>(grid: &QuantileGrid<T>, opts: &RaOptions) -> Result<Vec<RearrangementResult<T>>> {
    check_shape(grid)?;
    (0..=opts.restarts)
        .into_par_iter()
        .map(|k| {
            let identity: Vec<usize> = (0..grid.m()).collect();
            let mut perms = vec![identity; grid.n()];
            if k > 0 {
                let mut rng = seeded(opts.seed.wrapping_add(k as u64));
                for p in perms.iter_mut().skip(1) {
                    p.shuffle(&mut rng);
                }
            }
            ra_minimize_from(grid, perms, opts.max_sweeps, opts.tol)
        })
        .collect()
}

/// Best of `opts.restarts + 1` runs by spread; ties go to the lexicographically smallest
/// permutation tuple.
pub fn ra_minimize_restarts<T: Scalar>(grid: &QuantileGrid<T>, opts: &RaOptions) -> Result<RearrangementResult<T>> {
    let runs = ra_runs(grid, opts)?;
    Ok(runs
        .into_iter()
        .min_by(|a, b| {
            a.row_sum_spread
                .partial_cmp(&b.row_sum_spread)
                .unwrap_or(Ordering::Equal)
                .then_with(|| a.permutations.cmp(&b.permutations))
        })
        .expect("at least one run"))
}
