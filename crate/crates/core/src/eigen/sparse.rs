//! Symmetric sparse matrices in compressed-row form.

use super::lanczos::LinearOperator;
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// Both triangles are stored, so a row holds every off-diagonal entry of
/// that row.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSymmetric {
    diag: Vec<f64>,
    offsets: Vec<usize>,
    columns: Vec<u32>,
    values: Vec<f64>,
}

impl SparseSymmetric {
    /// `upper` lists `(i, j, a_ij)` with `i != j`, each unordered pair once.
    pub fn new(diag: Vec<f64>, upper: &[(usize, usize, f64)]) -> Result<Self> {
        let n = diag.len();
        if n > u32::MAX as usize {
            return Err(Error::contract("sparse matrix too large"));
        }
        if diag.iter().any(|x| !x.is_finite()) {
            return Err(Error::contract("non-finite diagonal entry"));
        }
        let mut counts = vec![0usize; n + 1];
        for &(i, j, v) in upper {
            if i >= n || j >= n || i == j {
                return Err(Error::contract(format!("bad off-diagonal index ({i}, {j})")));
            }
            if !v.is_finite() {
                return Err(Error::contract(format!("non-finite entry at ({i}, {j})")));
            }
            counts[i + 1] += 1;
            counts[j + 1] += 1;
        }
        for r in 0..n {
            counts[r + 1] += counts[r];
        }
        let offsets = counts.clone();
        let mut fill = counts;
        let mut columns = vec![0u32; offsets[n]];
        let mut values = vec![0.0; offsets[n]];
        for &(i, j, v) in upper {
            for (r, c) in [(i, j), (j, i)] {
                columns[fill[r]] = c as u32;
                values[fill[r]] = v;
                fill[r] += 1;
            }
        }
        for r in 0..n {
            let range = offsets[r]..offsets[r + 1];
            let mut row: Vec<(u32, f64)> = columns[range.clone()]
                .iter()
                .copied()
                .zip(values[range.clone()].iter().copied())
                .collect();
            row.sort_by_key(|e| e.0);
            if row.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(Error::contract(format!("duplicate entry in row {r}")));
            }
            for (slot, (c, v)) in range.zip(row) {
                columns[slot] = c;
                values[slot] = v;
            }
        }
        Ok(Self {
            diag,
            offsets,
            columns,
            values,
        })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// Stored off-diagonal entries, both triangles.
    pub fn off_diagonal_count(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        let range = self.offsets[i]..self.offsets[i + 1];
        match self.columns[range.clone()].binary_search(&(j as u32)) {
            Ok(p) => self.values[range.start + p],
            Err(_) => 0.0,
        }
    }

    /// Off-diagonal `(column, value)` entries of row `i`.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[i]..self.offsets[i + 1];
        self.columns[range.clone()]
            .iter()
            .map(|&c| c as usize)
            .zip(self.values[range].iter().copied())
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n());
        for i in 0..self.n() {
            m[(i, i)] = self.diag[i];
            for (j, v) in self.row(i) {
                m[(i, j)] = v;
            }
        }
        m
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n()];
        self.apply(x, &mut y);
        y
    }
}

impl LinearOperator for SparseSymmetric {
    fn dim(&self) -> usize {
        self.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut acc = self.diag[i] * x[i];
            for p in self.offsets[i]..self.offsets[i + 1] {
                acc += self.values[p] * x[self.columns[p] as usize];
            }
            *yi = acc;
        }
    }

    /// Largest absolute row sum.
    fn norm_bound(&self) -> f64 {
        (0..self.n())
            .map(|i| self.diag[i].abs() + self.row(i).map(|(_, v)| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}
