use serde::Serialize;

use crate::distributions::UnivariateFamily;
use crate::error::{domain, Result};
use crate::scalar::Scalar;

/// `m × n` matrix of midpoint quantiles; column `j` holds `F_j^{-1}((k - 1/2)/m)`, `k = 1..m`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuantileGrid<T> {
    columns: Vec<Vec<T>>,
}

impl<T: Scalar> QuantileGrid<T> {
    /// Builds a grid from explicit columns, which must be nondecreasing, finite and of equal length.
    pub fn from_columns(columns: Vec<Vec<T>>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return domain("grid needs at least one column");
        };
        let m = first.len();
        if m == 0 {
            return domain("grid columns must be nonempty");
        }
        for (j, c) in columns.iter().enumerate() {
            if c.len() != m {
                return domain(format!("column {j} has {} atoms, expected {m}", c.len()));
            }
            if c.iter().any(|x| !x.is_finite()) {
                return domain(format!("column {j} has non-finite atoms"));
            }
            if c.windows(2).any(|w| w[1] < w[0]) {
                return domain(format!("column {j} is not nondecreasing"));
            }
        }
        Ok(Self { columns })
    }

    pub fn m(&self) -> usize {
        self.columns[0].len()
    }

    pub fn n(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<T>] {
        &self.columns
    }

    /// Row sums when column `j` is read in the order `perms[j]`, accumulated left to right.
    pub fn row_sums(&self, perms: &[Vec<usize>]) -> Vec<T> {
        (0..self.m())
            .map(|r| {
                let mut s = T::zero();
                for (col, perm) in self.columns.iter().zip(perms) {
                    s += col[perm[r]];
                }
                s
            })
            .collect()
    }

    pub fn cast<U: Scalar>(&self) -> QuantileGrid<U> {
        QuantileGrid {
            columns: self
                .columns
                .iter()
                .map(|c| c.iter().map(|x| U::from_f64_lossy(x.to_f64_lossy())).collect())
                .collect(),
        }
    }
}

/// Midpoint-quantile discretization of each family into `m` equally likely atoms.
pub fn discretize(families: &[UnivariateFamily], m: usize) -> Result<QuantileGrid<f64>> {
    if m < 2 {
        return domain(format!("grid size m = {m} must be at least 2"));
    }
    if families.is_empty() {
        return domain("no families to discretize");
    }
    let mut columns = Vec::with_capacity(families.len());
    for f in families {
        f.validate()?;
        let mut col = Vec::with_capacity(m);
        for k in 0..m {
            let p = (k as f64 + 0.5) / m as f64;
            let x = f.quantile(p)?;
            if !x.is_finite() {
                return domain(format!("quantile at {p} is not finite for {f:?}"));
            }
            col.push(x);
        }
        // bisection noise can break ties in the wrong direction by an ulp
        for k in 1..m {
            if col[k] < col[k - 1] {
                col[k] = col[k - 1];
            }
        }
        columns.push(col);
    }
    QuantileGrid::from_columns(columns)
}

/// Spread (max - min) of a list of values.
pub fn spread<T: Scalar>(xs: &[T]) -> T {
    let (lo, hi) = xs
        .iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo
}

/// Population variance, mean taken first.
pub fn variance<T: Scalar>(xs: &[T]) -> T {
    let n = T::from_count(xs.len());
    let mean = xs.iter().copied().sum::<T>() / n;
    xs.iter().map(|&x| (x - mean) * (x - mean)).sum::<T>() / n
}
