use itertools::Itertools;
use rayon::prelude::*;
use serde::Serialize;

use super::grid::QuantileGrid;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_ATOMS: usize = 8;
pub const MAX_COLUMNS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BruteForceResult<T> {
    pub spread: T,
    /// Same layout as the rearrangement result; column 0 is the identity.
    pub permutations: Vec<Vec<usize>>,
}

/// Spread of the row sums for `col0 + col1[p] + col2[q]`, abandoning the scan once it
/// reaches `bound`.
fn spread_below<T: Scalar>(grid: &QuantileGrid<T>, p: &[usize], q: Option<&[usize]>, bound: T) -> Option<T> {
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    for r in 0..grid.m() {
        let mut s = T::zero();
        s += grid.column(0)[r];
        s += grid.column(1)[p[r]];
        if let Some(q) = q {
            s += grid.column(2)[q[r]];
        }
        lo = lo.min(s);
        hi = hi.max(s);
        if hi - lo >= bound {
            return None;
        }
    }
    Some(hi - lo)
}

/// Exhaustive minimum of the row-sum spread over all arrangements with column 0 fixed.
///
/// Limited to `m <= 8` atoms and `n <= 3` columns. Among optimal arrangements the
/// lexicographically smallest permutation tuple is returned.
pub fn brute_force_min_spread<T: Scalar>(grid: &QuantileGrid<T>) -> Result<BruteForceResult<T>> {
    let (m, n) = (grid.m(), grid.n());
    if m > MAX_ATOMS || n > MAX_COLUMNS {
        return Err(Error::SizeLimit(format!(
            "m = {m}, n = {n}; exhaustive search supports m <= {MAX_ATOMS} and n <= {MAX_COLUMNS}"
        )));
    }
    let identity: Vec<usize> = (0..m).collect();
    if n == 1 {
        return Ok(BruteForceResult { spread: super::grid::spread(grid.column(0)), permutations: vec![identity] });
    }
    let perms: Vec<Vec<usize>> = (0..m).permutations(m).collect();
    let best = perms
        .par_iter()
        .enumerate()
        .fold(
            || None::<(T, usize, usize)>,
            |mut best, (i, p)| {
                let inner: &[Vec<usize>] = if n == 3 { &perms } else { &perms[..1] };
                for (k, q) in inner.iter().enumerate() {
                    let bound = best.map_or(T::infinity(), |b| b.0);
                    let q = (n == 3).then_some(q.as_slice());
                    if let Some(s) = spread_below(grid, p, q, bound) {
                        best = Some((s, i, k));
                    }
                }
                best
            },
        )
        .reduce(
            || None,
            |a, b| match (a, b) {
                (Some(x), Some(y)) => {
                    let ord = x.0.partial_cmp(&y.0).expect("finite spreads").then((x.1, x.2).cmp(&(y.1, y.2)));
                    Some(if ord.is_le() { x } else { y })
                }
                (x, None) => x,
                (None, y) => y,
            },
        )
        .expect("at least one arrangement");
    let mut permutations = vec![identity, perms[best.1].clone()];
    if n == 3 {
        permutations.push(perms[best.2].clone());
    }
    Ok(BruteForceResult { spread: best.0, permutations })
}
