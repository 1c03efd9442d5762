//! Exact low-lying spectrum of the full transverse-field Hamiltonian
//! `H(s) = -(Δ/2) Σ σˣ_i + (𝓔/2) H_P` on all `2^n` basis states.

use rayon::prelude::*;
use serde::Serialize;

use super::dense::symmetric_eigenvalues;
use super::lanczos::{lowest_eigenpairs, LanczosOptions, LinearOperator};
use super::matrix::Matrix;
use crate::error::{Error, Result};
use crate::ising::{IsingProblem, Scales, Schedule};

pub const EXACT_MAX_QUBITS: usize = 20;
pub const DENSE_MAX_QUBITS: usize = 12;

const PARALLEL_DIM: usize = 1 << 12;

#[derive(Debug, Clone, Serialize)]
pub struct ExactSpectrum {
    pub s: f64,
    pub n: usize,
    pub eigenvalues: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExactMethod {
    /// Dense up to [`DENSE_MAX_QUBITS`], Lanczos beyond.
    #[default]
    Auto,
    Dense,
    Iterative,
}

#[derive(Debug, Clone, Default)]
pub struct ExactOptions {
    pub method: ExactMethod,
    pub seed: u64,
}

/// Matrix-free `H(s)`: diagonal classical part plus one bit flip per qubit.
pub struct TransverseFieldOperator {
    n: usize,
    diagonal: Vec<f64>,
    half_delta: f64,
    bound: f64,
}

impl TransverseFieldOperator {
    pub fn new(problem: &IsingProblem, scales: Scales) -> Result<Self> {
        let n = problem.n();
        if n > EXACT_MAX_QUBITS {
            return Err(Error::Feasibility(format!(
                "exact diagonalization needs n <= {EXACT_MAX_QUBITS}, got {n}"
            )));
        }
        let half_eps = 0.5 * scales.eps;
        let diagonal: Vec<f64> = (0..1u64 << n)
            .into_par_iter()
            .map(|x| half_eps * problem.energy_of_index(x))
            .collect();
        let classical_bound: f64 = problem.h().iter().map(|h| h.abs()).sum::<f64>()
            + problem.couplings().values().map(|j| j.abs()).sum::<f64>();
        let bound = half_eps * classical_bound + n as f64 * 0.5 * scales.delta;
        Ok(Self {
            n,
            diagonal,
            half_delta: 0.5 * scales.delta,
            bound,
        })
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    fn row(&self, x: usize, v: &[f64]) -> f64 {
        let mut flips = 0.0;
        for i in 0..self.n {
            flips += v[x ^ (1 << i)];
        }
        self.diagonal[x] * v[x] - self.half_delta * flips
    }
}

impl LinearOperator for TransverseFieldOperator {
    fn dim(&self) -> usize {
        self.diagonal.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        if y.len() >= PARALLEL_DIM {
            y.par_iter_mut()
                .enumerate()
                .for_each(|(i, out)| *out = self.row(i, x));
        } else {
            for (i, out) in y.iter_mut().enumerate() {
                *out = self.row(i, x);
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        self.bound
    }
}

/// Explicit `2^n × 2^n` matrix of `H(s)`.
pub fn dense_hamiltonian(problem: &IsingProblem, scales: Scales) -> Result<Matrix> {
    let n = problem.n();
    if n > DENSE_MAX_QUBITS {
        return Err(Error::Feasibility(format!(
            "dense Hamiltonian needs n <= {DENSE_MAX_QUBITS}, got {n}"
        )));
    }
    let dim = 1usize << n;
    let mut m = Matrix::zeros(dim);
    let half_eps = 0.5 * scales.eps;
    for x in 0..dim {
        m[(x, x)] = half_eps * problem.energy_of_index(x as u64);
        for i in 0..n {
            m[(x, x ^ (1 << i))] = -0.5 * scales.delta;
        }
    }
    Ok(m)
}

/// Lowest `m` eigenvalues of `H` at fixed scales.
pub fn exact_levels(
    problem: &IsingProblem,
    scales: Scales,
    m: usize,
    options: &ExactOptions,
) -> Result<Vec<f64>> {
    let n = problem.n();
    if n > EXACT_MAX_QUBITS {
        return Err(Error::Feasibility(format!(
            "exact diagonalization needs n <= {EXACT_MAX_QUBITS}, got {n}"
        )));
    }
    let dim = 1usize << n;
    if m == 0 || m > dim {
        return Err(Error::contract(format!(
            "level count {m} outside 1..={dim}"
        )));
    }
    let dense = match options.method {
        ExactMethod::Dense => true,
        ExactMethod::Iterative => false,
        ExactMethod::Auto => n <= DENSE_MAX_QUBITS,
    };
    if dense {
        let mut values = symmetric_eigenvalues(&dense_hamiltonian(problem, scales)?)?;
        values.truncate(m);
        Ok(values)
    } else {
        let op = TransverseFieldOperator::new(problem, scales)?;
        let lanczos = LanczosOptions {
            seed: options.seed,
            ..Default::default()
        };
        Ok(lowest_eigenpairs(&op, m, &lanczos)?.values().to_vec())
    }
}

pub fn exact_spectrum(
    problem: &IsingProblem,
    s: f64,
    schedule: &Schedule,
    m: usize,
) -> Result<ExactSpectrum> {
    exact_spectrum_with(problem, s, schedule, m, &ExactOptions::default())
}

pub fn exact_spectrum_with(
    problem: &IsingProblem,
    s: f64,
    schedule: &Schedule,
    m: usize,
    options: &ExactOptions,
) -> Result<ExactSpectrum> {
    let scales = schedule.at(s)?;
    Ok(ExactSpectrum {
        s,
        n: problem.n(),
        eigenvalues: exact_levels(problem, scales, m, options)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ising::Topology;

    fn single(h: f64) -> IsingProblem {
        IsingProblem::new(1, vec![h], vec![]).unwrap()
    }

    #[test]
    fn single_qubit_closed_form() {
        for (delta, eps) in [(1.0, 0.0), (0.3, 2.0), (0.0, 1.5), (4.0, 4.0)] {
            let scales = Scales { delta, eps };
            let got = exact_levels(&single(1.0), scales, 2, &ExactOptions::default()).unwrap();
            let r = 0.5 * (delta * delta + eps * eps).sqrt();
            assert!((got[0] + r).abs() < 1e-14);
            assert!((got[1] - r).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_transverse_field_is_classical() {
        let p = Topology::ring(6).instance(4).unwrap();
        let scales = Scales { delta: 0.0, eps: 3.0 };
        let got = exact_levels(&p, scales, 64, &ExactOptions::default()).unwrap();
        let mut classical: Vec<f64> = (0..64).map(|x| 1.5 * p.energy_of_index(x)).collect();
        classical.sort_by(f64::total_cmp);
        for (a, b) in got.iter().zip(&classical) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn product_reproduces_matrix_columns() {
        for n in 1..=6 {
            let p = Topology::path(n).instance(n as u64).unwrap();
            let scales = Scales { delta: 0.7, eps: 1.3 };
            let m = dense_hamiltonian(&p, scales).unwrap();
            let op = TransverseFieldOperator::new(&p, scales).unwrap();
            let dim = 1 << n;
            let mut y = vec![0.0; dim];
            for c in 0..dim {
                let mut e = vec![0.0; dim];
                e[c] = 1.0;
                op.apply(&e, &mut y);
                for r in 0..dim {
                    assert_eq!(y[r], m[(r, c)]);
                }
            }
        }
    }

    #[test]
    fn dense_and_iterative_agree_at_eight_qubits() {
        let p = Topology::grid(2, 4).instance(8).unwrap();
        let schedule = Schedule::synthetic_default();
        for s in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let dense = ExactOptions { method: ExactMethod::Dense, seed: 1 };
            let iter = ExactOptions { method: ExactMethod::Iterative, seed: 1 };
            let a = exact_spectrum_with(&p, s, &schedule, 6, &dense).unwrap();
            let b = exact_spectrum_with(&p, s, &schedule, 6, &iter).unwrap();
            for (x, y) in a.eigenvalues.iter().zip(&b.eigenvalues) {
                assert!((x - y).abs() < 1e-8, "s={s}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn guards() {
        let big = Topology::path(21).instance(0).unwrap();
        assert!(matches!(
            exact_levels(&big, Scales { delta: 1.0, eps: 1.0 }, 1, &ExactOptions::default()),
            Err(Error::Feasibility(_))
        ));
        assert!(matches!(
            exact_levels(&single(1.0), Scales { delta: 1.0, eps: 1.0 }, 3, &ExactOptions::default()),
            Err(Error::Contract(_))
        ));
    }
}
