use serde::{Deserialize, Serialize};

use crate::generators::CharacteristicGenerator;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingKind {
    Elliptical,
    Slash,
    ScaleMixture,
    /// Scale mixture whose conditional coupling is a rearrangement table.
    ScaleMixtureRearranged,
    MatrixVariate,
    /// Rows read from a file or built by the caller; no construction claimed.
    External,
}

/// Grid size and residual spread of a rearrangement-based coupling.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Approximation {
    pub grid_m: usize,
    pub row_sum_spread: f64,
}

/// `N × n` joint draws, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleBatch<T> {
    pub n_vars: usize,
    pub data: Vec<T>,
    pub seed: u64,
    pub joint_center: Option<T>,
    pub kind: CouplingKind,
    pub generator: Option<CharacteristicGenerator>,
    pub approximation: Option<Approximation>,
}

impl<T: Scalar> SampleBatch<T> {
    pub fn external(n_vars: usize, data: Vec<T>) -> Self {
        assert!(n_vars > 0 && data.len().is_multiple_of(n_vars), "data must hold whole rows");
        Self { n_vars, data, seed: 0, joint_center: None, kind: CouplingKind::External, generator: None, approximation: None }
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.n_vars
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn rows(&self) -> std::slice::ChunksExact<'_, T> {
        self.data.chunks_exact(self.n_vars)
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n_vars..(i + 1) * self.n_vars]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        self.rows().map(|r| r[j]).collect()
    }

    /// Row sums accumulated left to right.
    pub fn row_sums(&self) -> Vec<T> {
        self.rows()
            .map(|r| {
                let mut s = T::zero();
                for &x in r {
                    s += x;
                }
                s
            })
            .collect()
    }
}

/// Joint draws of `n` vectors in `ℝᵖ`: draw `d` is the `p × n` matrix stored column-major
/// at `data[d * p * n ..]`, so column `j` (the `j`-th vector) is contiguous.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixBatch<T> {
    pub p: usize,
    pub n: usize,
    pub data: Vec<T>,
    pub seed: u64,
    pub generator: CharacteristicGenerator,
}

impl<T: Scalar> MatrixBatch<T> {
    pub fn len(&self) -> usize {
        self.data.len() / (self.p * self.n)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn draw(&self, d: usize) -> &[T] {
        let size = self.p * self.n;
        &self.data[d * size..(d + 1) * size]
    }

    /// The `j`-th vector of draw `d`.
    pub fn vector(&self, d: usize, j: usize) -> &[T] {
        &self.draw(d)[j * self.p..(j + 1) * self.p]
    }

    /// `X₁ + ⋯ + X_n` for draw `d`.
    pub fn column_sum(&self, d: usize) -> Vec<T> {
        (0..self.p)
            .map(|i| {
                let mut s = T::zero();
                for j in 0..self.n {
                    s += self.vector(d, j)[i];
                }
                s
            })
            .collect()
    }
}
