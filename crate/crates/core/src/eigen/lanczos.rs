//! Thick-restart Lanczos with full reorthogonalization and locking.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::dense::{diagonalize_lowest, fix_sign, EigenDecomposition};
use super::matrix::{axpy, dot, norm, Matrix};
use crate::error::{Error, Result};

/// A symmetric operator known only through its action on vectors.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;

    /// `y <- A x`.
    fn apply(&self, x: &[f64], y: &mut [f64]);

    /// Any upper bound on the spectral norm.
    fn norm_bound(&self) -> f64;
}

#[derive(Debug, Clone)]
pub struct LanczosOptions {
    pub seed: u64,
    /// Residual target relative to the norm bound.
    pub tolerance: f64,
    pub max_restarts: usize,
    /// Basis size cap; `None` picks one from the dimension.
    pub max_basis: Option<usize>,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tolerance: 1e-10,
            max_restarts: 2000,
            max_basis: None,
        }
    }
}

fn default_basis(dim: usize) -> usize {
    (1usize << 25).checked_div(dim).unwrap_or(0).clamp(24, 200)
}

/// Lowest `count` eigenpairs. One pair is locked per inner run, each run
/// restarting from a fresh random vector orthogonal to the locked ones, so
/// degenerate eigenvalues are found with their full multiplicity.
pub fn lowest_eigenpairs(
    op: &dyn LinearOperator,
    count: usize,
    options: &LanczosOptions,
) -> Result<EigenDecomposition> {
    let dim = op.dim();
    if count == 0 || count > dim {
        return Err(Error::contract(format!(
            "requested {count} eigenpairs of a {dim}-dimensional operator"
        )));
    }
    let hnorm = op.norm_bound().max(f64::MIN_POSITIVE);
    let cap = options.max_basis.unwrap_or_else(|| default_basis(dim)).max(4);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    while locked.len() < count {
        let remaining = count - locked.len();
        let (theta, x) = lowest_in_complement(op, &locked, remaining, cap, hnorm, options, &mut rng)?;
        values.push(theta);
        locked.push(x);
    }
    let mut order: Vec<usize> = (0..count).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v = std::mem::take(&mut locked[i]);
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok(EigenDecomposition::new(sorted_values, vectors))
}

fn random_start(dim: usize, locked: &[Vec<f64>], rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        project_out(&mut v, locked, None);
        let s = norm(&v);
        if s > 1e-8 {
            v.iter_mut().for_each(|x| *x /= s);
            return v;
        }
    }
}

/// Two passes of Gram-Schmidt; coefficients are accumulated into `coef`.
fn project_out(w: &mut [f64], basis: &[Vec<f64>], mut coef: Option<&mut [f64]>) {
    for _ in 0..2 {
        for (i, b) in basis.iter().enumerate() {
            let c = dot(b, w);
            axpy(-c, b, w);
            if let Some(acc) = coef.as_deref_mut() {
                acc[i] += c;
            }
        }
    }
}

fn combine(basis: &[Vec<f64>], y: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; basis[0].len()];
    for (b, &c) in basis.iter().zip(y) {
        axpy(c, b, &mut x);
    }
    x
}

fn lowest_in_complement(
    op: &dyn LinearOperator,
    locked: &[Vec<f64>],
    remaining: usize,
    cap: usize,
    hnorm: f64,
    options: &LanczosOptions,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, Vec<f64>)> {
    let dim = op.dim();
    let available = dim - locked.len();
    let cap = cap.min(available);
    let tol = options.tolerance * hnorm;
    let keep_target = (remaining + 8).min(cap.saturating_sub(2)).max(1);

    let mut basis = vec![random_start(dim, locked, rng)];
    let mut t = Matrix::zeros(cap);
    let mut w = vec![0.0; dim];
    let mut hx = vec![0.0; dim];
    let mut restarts = 0;
    let mut last_residual;
    loop {
        let j = basis.len() - 1;
        op.apply(&basis[j], &mut w);
        let mut coef = vec![0.0; j + 1];
        project_out(&mut w, locked, None);
        project_out(&mut w, &basis, Some(&mut coef));
        for (i, &c) in coef.iter().enumerate() {
            t[(i, j)] = c;
            t[(j, i)] = c;
        }
        let beta = norm(&w);
        let size = j + 1;
        let breakdown = beta <= 1e-12 * hnorm;
        let full = size == cap;

        if breakdown || full || size % 4 == 0 {
            let small = Matrix::from_fn(size, |a, b| t[(a, b)]);
            let keep = if full { keep_target.min(size) } else { 1 };
            let ritz = diagonalize_lowest(&small, keep)?;
            let y0 = ritz.vector(0).expect("at least one Ritz vector");
            let estimate = beta * y0[size - 1].abs();
            if breakdown || estimate <= tol {
                let mut x = combine(&basis, y0);
                project_out(&mut x, locked, None);
                let s = norm(&x);
                x.iter_mut().for_each(|v| *v /= s);
                op.apply(&x, &mut hx);
                let rq = dot(&x, &hx);
                axpy(-rq, &x, &mut hx);
                let residual = norm(&hx);
                last_residual = residual;
                if residual <= tol || breakdown {
                    if residual > tol.max(1e-8 * hnorm) {
                        return Err(Error::Convergence {
                            iterations: restarts,
                            residual,
                        });
                    }
                    return Ok((rq, x));
                }
            } else {
                last_residual = estimate;
            }
            if full {
                restarts += 1;
                if restarts > options.max_restarts {
                    return Err(Error::Convergence {
                        iterations: restarts,
                        residual: last_residual,
                    });
                }
                let mut kept: Vec<Vec<f64>> = (0..ritz.vector_count())
                    .map(|i| combine(&basis, ritz.vector(i).unwrap()))
                    .collect();
                if kept.len() >= cap {
                    kept.truncate(cap - 1);
                }
                t = Matrix::zeros(cap);
                for (i, &v) in ritz.values()[..kept.len()].iter().enumerate() {
                    t[(i, i)] = v;
                }
                w.iter_mut().for_each(|v| *v /= beta);
                kept.push(std::mem::take(&mut w));
                w = vec![0.0; dim];
                basis = kept;
                continue;
            }
        }
        w.iter_mut().for_each(|v| *v /= beta);
        basis.push(std::mem::replace(&mut w, vec![0.0; dim]));
    }
}
