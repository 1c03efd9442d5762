//! Dense symmetric eigensolver: Householder reduction to tridiagonal form,
//! then implicit-shift QL. Partial solves take every eigenvalue but only the
//! lowest eigenvectors, found by inverse iteration on the tridiagonal matrix.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::{dot, norm, Matrix};
use crate::error::{Error, Result};

/// Relative asymmetry accepted on input.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

const MAX_QL_SWEEPS: usize = 60;

/// Eigenvalues in ascending order with orthonormal eigenvectors for the
/// lowest `vectors.len()` of them.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: Vec<f64>,
    vectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn new(values: Vec<f64>, vectors: Vec<Vec<f64>>) -> Self {
        assert!(vectors.len() <= values.len());
        Self { values, vectors }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    /// Number of eigenvalues that come with a vector.
    pub fn vector_count(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_complete(&self) -> bool {
        self.vectors.len() == self.values.len()
    }

    pub fn vector(&self, i: usize) -> Option<&[f64]> {
        self.vectors.get(i).map(Vec::as_slice)
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

fn check_input(a: &Matrix) -> Result<()> {
    if let Some(pos) = a.as_slice().iter().position(|x| !x.is_finite()) {
        return Err(Error::contract(format!(
            "non-finite matrix entry at ({}, {})",
            pos / a.n(),
            pos % a.n()
        )));
    }
    let scale = a.max_abs();
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOLERANCE * scale {
        return Err(Error::contract(format!(
            "matrix is not symmetric: asymmetry {asym:e} against scale {scale:e}"
        )));
    }
    Ok(())
}

/// Full decomposition of a real symmetric matrix.
pub fn diagonalize_symmetric(a: &Matrix) -> Result<EigenDecomposition> {
    check_input(a)?;
    let n = a.n();
    let mut work = a.clone();
    let tri = tridiagonalize(&mut work);
    let mut zt = tri.orthogonal_transpose(&work);
    let mut d = tri.diag.clone();
    let mut e = tri.off.clone();
    e.push(0.0);
    tql(&mut d, &mut e, Some(&mut zt))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let values = order.iter().map(|&i| d[i]).collect();
    let vectors = order
        .iter()
        .map(|&i| {
            let mut v = zt.row(i).to_vec();
            fix_sign(&mut v);
            v
        })
        .collect();
    Ok(EigenDecomposition { values, vectors })
}

/// Eigenvalues only, ascending.
pub fn symmetric_eigenvalues(a: &Matrix) -> Result<Vec<f64>> {
    check_input(a)?;
    let mut work = a.clone();
    let tri = tridiagonalize(&mut work);
    tri.eigenvalues()
}

/// All eigenvalues, eigenvectors for the lowest `count`.
///
/// Costs one reduction plus `O(n^2)` per requested vector, so it beats
/// [`diagonalize_symmetric`] when `count` is small against `n`.
pub fn diagonalize_lowest(a: &Matrix, count: usize) -> Result<EigenDecomposition> {
    check_input(a)?;
    let n = a.n();
    let count = count.min(n);
    let mut work = a.clone();
    let tri = tridiagonalize(&mut work);
    let values = tri.eigenvalues()?;
    let mut vectors = tri.inverse_iteration(&values[..count]);
    for v in &mut vectors {
        tri.back_transform(&work, v);
        let scale = norm(v);
        v.iter_mut().for_each(|x| *x /= scale);
        fix_sign(v);
    }
    Ok(EigenDecomposition { values, vectors })
}

/// Makes the largest-magnitude component (first one on ties) positive.
pub(crate) fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

/// `T = Qᵀ A Q` with `Q = H_0 H_1 ... H_{n-3}`; reflector `j` is
/// `I - tau_j v vᵀ` with `v_{j+1} = 1` and `v_{j+2..}` stored in row `j` of
/// the reduced work matrix.
pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
    taus: Vec<f64>,
}

/// Reflector taking `x` to `beta e_1`: returns `(tau, beta)` and leaves
/// `v[1..]` in `x[1..]`.
fn householder(x: &mut [f64]) -> (f64, f64) {
    let alpha = x[0];
    let sigma: f64 = x[1..].iter().map(|t| t * t).sum();
    if sigma == 0.0 {
        return (0.0, alpha);
    }
    let r = alpha.hypot(sigma.sqrt());
    let beta = if alpha >= 0.0 { -r } else { r };
    let scale = 1.0 / (alpha - beta);
    x[1..].iter_mut().for_each(|t| *t *= scale);
    x[0] = 1.0;
    ((beta - alpha) / beta, beta)
}

pub(crate) fn tridiagonalize(a: &mut Matrix) -> Tridiagonal {
    let n = a.n();
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    let mut taus = vec![0.0; n];
    if n == 0 {
        return Tridiagonal { diag, off, taus };
    }
    if n < 3 {
        diag[0] = a[(0, 0)];
        if n == 2 {
            off[0] = a[(0, 1)];
            diag[1] = a[(1, 1)];
        }
        return Tridiagonal { diag, off, taus };
    }

    let mut v = vec![0.0; n];
    let mut p = vec![0.0; n];
    let mut w = vec![0.0; n];

    // First reflector and its product `A22 v` by a plain pass; after that,
    // each step's rank-2 update also forms the next step's product.
    let (mut tau, mut beta) = {
        let row = &mut a.row_mut(0)[1..];
        let hb = householder(row);
        v[1..].copy_from_slice(row);
        hb
    };
    for i in 1..n {
        p[i] = dot(&a.row(i)[1..], &v[1..]);
    }

    for j in 0..n - 2 {
        let lo = j + 1;
        diag[j] = a[(j, j)];
        off[j] = beta;
        taus[j] = tau;
        if tau != 0.0 {
            // reflector tail is kept in row j for the back-transform
            let tail = v[lo + 1..].to_vec();
            a.row_mut(j)[lo + 1..].copy_from_slice(&tail);
            for i in lo..n {
                p[i] *= tau;
            }
            let k = 0.5 * tau * dot(&v[lo..], &p[lo..]);
            for i in lo..n {
                w[i] = p[i] - k * v[i];
            }
        } else {
            w[lo..].iter_mut().for_each(|x| *x = 0.0);
            v[lo..].iter_mut().for_each(|x| *x = 0.0);
        }

        // Row `lo` first: it yields the next reflector.
        {
            let (vl, wl) = (v[lo], w[lo]);
            let row = a.row_mut(lo);
            for c in lo..n {
                row[c] -= vl * w[c] + wl * v[c];
            }
        }
        let next_lo = lo + 1;
        let has_next = next_lo + 1 < n;
        let mut next_v = vec![0.0; n];
        let (next_tau, next_beta) = if has_next {
            let mut x = a.row(lo)[next_lo..].to_vec();
            let hb = householder(&mut x);
            next_v[next_lo..].copy_from_slice(&x);
            hb
        } else {
            (0.0, 0.0)
        };

        for i in next_lo..n {
            let (vi, wi) = (v[i], w[i]);
            let row = a.row_mut(i);
            for c in next_lo..n {
                row[c] -= vi * w[c] + wi * v[c];
            }
            if has_next && next_tau != 0.0 {
                p[i] = dot(&a.row(i)[next_lo..], &next_v[next_lo..]);
            }
        }

        v = next_v;
        tau = next_tau;
        beta = next_beta;
    }
    diag[n - 2] = a[(n - 2, n - 2)];
    off[n - 2] = a[(n - 2, n - 1)];
    diag[n - 1] = a[(n - 1, n - 1)];
    Tridiagonal { diag, off, taus }
}

impl Tridiagonal {
    fn n(&self) -> usize {
        self.diag.len()
    }

    /// `y <- Q y`.
    pub(crate) fn back_transform(&self, work: &Matrix, y: &mut [f64]) {
        let n = self.n();
        for j in (0..n.saturating_sub(2)).rev() {
            let tau = self.taus[j];
            if tau == 0.0 {
                continue;
            }
            let tail = &work.row(j)[j + 2..];
            let s = y[j + 1] + dot(tail, &y[j + 2..]);
            let f = tau * s;
            y[j + 1] -= f;
            for (yi, vi) in y[j + 2..].iter_mut().zip(tail) {
                *yi -= f * vi;
            }
        }
    }

    /// `Qᵀ` as a dense matrix (row `i` is column `i` of `Q`).
    pub(crate) fn orthogonal_transpose(&self, work: &Matrix) -> Matrix {
        let n = self.n();
        let mut qt = Matrix::identity(n);
        // Qᵀ = H_{n-3} ... H_0: left-apply H_0 first.
        let mut r = vec![0.0; n];
        for j in 0..n.saturating_sub(2) {
            let tau = self.taus[j];
            if tau == 0.0 {
                continue;
            }
            let tail = &work.row(j)[j + 2..];
            r.copy_from_slice(qt.row(j + 1));
            for (k, &vk) in tail.iter().enumerate() {
                let row = qt.row(j + 2 + k);
                for (ri, x) in r.iter_mut().zip(row) {
                    *ri += vk * x;
                }
            }
            for (x, ri) in qt.row_mut(j + 1).iter_mut().zip(&r) {
                *x -= tau * ri;
            }
            for (k, &vk) in tail.iter().enumerate() {
                let f = tau * vk;
                for (x, ri) in qt.row_mut(j + 2 + k).iter_mut().zip(&r) {
                    *x -= f * ri;
                }
            }
        }
        qt
    }

    pub(crate) fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut d = self.diag.clone();
        let mut e = self.off.clone();
        e.push(0.0);
        tql(&mut d, &mut e, None)?;
        d.sort_by(f64::total_cmp);
        Ok(d)
    }

    fn norm_bound(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Eigenvectors of the tridiagonal matrix for the given ascending
    /// eigenvalues. Vectors whose eigenvalues sit within `1e-3 ‖T‖` of each
    /// other are kept mutually orthogonal.
    pub(crate) fn inverse_iteration(&self, values: &[f64]) -> Vec<Vec<f64>> {
        let n = self.n();
        let tnorm = self.norm_bound().max(f64::MIN_POSITIVE);
        let cluster_gap = 1e-3 * tnorm;
        let tiny = f64::EPSILON * tnorm;
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut out: Vec<Vec<f64>> = Vec::with_capacity(values.len());
        let mut cluster_start = 0;
        let mut prev_shift = f64::NEG_INFINITY;
        for (idx, &lambda) in values.iter().enumerate() {
            if idx > 0 && lambda - values[idx - 1] > cluster_gap {
                cluster_start = idx;
            }
            let mut shift = lambda;
            if idx > cluster_start && shift - prev_shift < 10.0 * tiny {
                shift = prev_shift + 10.0 * tiny;
            }
            prev_shift = shift;
            let lu = TridiagonalLu::factor(&self.diag, &self.off, shift, tiny);
            let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for _ in 0..4 {
                lu.solve(&mut x);
                orthogonalize(&mut x, &out[cluster_start..idx]);
                let s = norm(&x);
                if s == 0.0 || !s.is_finite() {
                    x = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    continue;
                }
                x.iter_mut().for_each(|t| *t /= s);
            }
            orthogonalize(&mut x, &out[cluster_start..idx]);
            let s = norm(&x);
            x.iter_mut().for_each(|t| *t /= s);
            out.push(x);
        }
        out
    }
}

/// Two passes of classical Gram-Schmidt against orthonormal `basis`.
pub(crate) fn orthogonalize(x: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, x);
            for (xi, bi) in x.iter_mut().zip(b) {
                *xi -= c * bi;
            }
        }
    }
}

/// LU factorization of `T - shift I` with partial pivoting.
struct TridiagonalLu {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
    upper2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(d: &[f64], e: &[f64], shift: f64, tiny: f64) -> Self {
        let n = d.len();
        let mut lower = e.to_vec();
        let mut diag: Vec<f64> = d.iter().map(|x| x - shift).collect();
        let mut upper = e.to_vec();
        let mut upper2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n.saturating_sub(1) {
            if diag[i].abs() >= lower[i].abs() {
                if diag[i] == 0.0 {
                    diag[i] = tiny;
                }
                let fact = lower[i] / diag[i];
                lower[i] = fact;
                diag[i + 1] -= fact * upper[i];
            } else {
                let fact = diag[i] / lower[i];
                diag[i] = lower[i];
                lower[i] = fact;
                let temp = upper[i];
                upper[i] = diag[i + 1];
                diag[i + 1] = temp - fact * diag[i + 1];
                if i + 2 < n {
                    upper2[i] = upper[i + 1];
                    upper[i + 1] = -fact * upper[i + 1];
                }
                swapped[i] = true;
            }
        }
        for x in diag.iter_mut() {
            if x.abs() < tiny {
                *x = if *x < 0.0 { -tiny } else { tiny };
            }
        }
        Self {
            lower,
            diag,
            upper,
            upper2,
            swapped,
        }
    }

    fn solve(&self, b: &mut [f64]) {
        let n = self.diag.len();
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - self.lower[i] * b[i];
            } else {
                b[i + 1] -= self.lower[i] * b[i];
            }
        }
        b[n - 1] /= self.diag[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.upper[n - 2] * b[n - 1]) / self.diag[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.upper[i] * b[i + 1] - self.upper2[i] * b[i + 2]) / self.diag[i];
        }
    }
}

/// Implicit-shift QL on the tridiagonal `(d, e)`, `e[i]` coupling `i` and
/// `i + 1` and `e[n-1] = 0`. Rotations are applied to the rows of `zt`.
pub(crate) fn tql(d: &mut [f64], e: &mut [f64], mut zt: Option<&mut Matrix>) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut sweeps = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            sweeps += 1;
            if sweeps > MAX_QL_SWEEPS {
                return Err(Error::Convergence {
                    iterations: sweeps,
                    residual: e[l].abs(),
                });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + if g >= 0.0 { r } else { -r });
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = zt.as_deref_mut() {
                    let cols = z.n();
                    let data = z.as_mut_slice();
                    let (head, tail) = data.split_at_mut((i + 1) * cols);
                    let zi = &mut head[i * cols..];
                    let zi1 = &mut tail[..cols];
                    for (a, b) in zi.iter_mut().zip(zi1.iter_mut()) {
                        let f = *b;
                        *b = s * *a + c * f;
                        *a = c * *a - s * f;
                    }
                }
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_symmetric(n: usize, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let x: f64 = rng.gen_range(-1.0..1.0);
                m[(i, j)] = x;
                m[(j, i)] = x;
            }
        }
        m
    }

    /// Cyclic Jacobi rotations: slow, simple, shares nothing with the
    /// Householder/QL path.
    fn jacobi_eigenvalues(a: &Matrix) -> Vec<f64> {
        let n = a.n();
        let mut m = a.clone();
        for _ in 0..100 {
            let off: f64 = (0..n)
                .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| m[(i, j)].powi(2))
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if m[(p, q)].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * m[(p, q)]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (m[(k, p)], m[(k, q)]);
                        m[(k, p)] = c * akp - s * akq;
                        m[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (m[(p, k)], m[(q, k)]);
                        m[(p, k)] = c * apk - s * aqk;
                        m[(q, k)] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut v: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
        v.sort_by(f64::total_cmp);
        v
    }

    fn residual(a: &Matrix, lambda: f64, v: &[f64]) -> f64 {
        let av = a.mul_vec(v);
        av.iter().zip(v).map(|(x, y)| (x - lambda * y).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn identity() {
        let dec = diagonalize_symmetric(&Matrix::identity(3)).unwrap();
        assert_eq!(dec.values(), &[1.0, 1.0, 1.0]);
        let low = diagonalize_lowest(&Matrix::identity(3), 3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot(low.vector(i).unwrap(), low.vector(j).unwrap()) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_x() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let dec = diagonalize_symmetric(&a).unwrap();
        assert!((dec.values()[0] + 1.0).abs() < 1e-15);
        assert!((dec.values()[1] - 1.0).abs() < 1e-15);
        let v = dec.vector(0).unwrap();
        assert!((v[0].abs() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn random_8x8_against_jacobi_and_reconstruction() {
        let a = random_symmetric(8, 8);
        let dec = diagonalize_symmetric(&a).unwrap();
        let reference = jacobi_eigenvalues(&a);
        for (x, y) in dec.values().iter().zip(&reference) {
            assert!((x - y).abs() < 1e-12, "{x} vs {y}");
        }
        let scale = a.frobenius_norm();
        let recon = Matrix::from_fn(8, |i, j| {
            (0..8)
                .map(|k| dec.values()[k] * dec.vector(k).unwrap()[i] * dec.vector(k).unwrap()[j])
                .sum()
        });
        let diff = Matrix::from_fn(8, |i, j| recon[(i, j)] - a[(i, j)]);
        assert!(diff.frobenius_norm() <= 1e-10 * scale);
    }

    #[test]
    fn partial_agrees_with_full() {
        for (n, seed) in [(1, 1), (2, 2), (3, 3), (17, 4), (60, 5)] {
            let a = random_symmetric(n, seed);
            let full = diagonalize_symmetric(&a).unwrap();
            let low = diagonalize_lowest(&a, 5).unwrap();
            assert_eq!(low.vector_count(), 5.min(n));
            for i in 0..n {
                assert!((full.values()[i] - low.values()[i]).abs() < 1e-12);
            }
            for i in 0..low.vector_count() {
                let v = low.vector(i).unwrap();
                assert!(residual(&a, low.values()[i], v) < 1e-10 * a.frobenius_norm());
                let overlap = dot(v, full.vector(i).unwrap()).abs();
                assert!((overlap - 1.0).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn partial_handles_degenerate_clusters() {
        // block diagonal with repeated blocks: every eigenvalue doubled
        let b = random_symmetric(6, 9);
        let a = Matrix::from_fn(12, |i, j| {
            if i / 6 == j / 6 {
                b[(i % 6, j % 6)]
            } else {
                0.0
            }
        });
        let low = diagonalize_lowest(&a, 6).unwrap();
        for i in 0..6 {
            let v = low.vector(i).unwrap();
            assert!(residual(&a, low.values()[i], v) < 1e-10 * a.frobenius_norm());
            for j in 0..i {
                assert!(dot(v, low.vector(j).unwrap()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        let mut a = Matrix::identity(3);
        a[(0, 1)] = 1e-3;
        assert!(matches!(diagonalize_symmetric(&a), Err(Error::Contract(_))));
        a[(0, 1)] = f64::NAN;
        assert!(matches!(diagonalize_symmetric(&a), Err(Error::Contract(_))));
    }

    #[test]
    fn sign_convention() {
        let a = random_symmetric(10, 77);
        let dec = diagonalize_symmetric(&a).unwrap();
        for v in dec.vectors() {
            let big = v.iter().fold(0.0f64, |m, x| if x.abs() > m.abs() { *x } else { m });
            assert!(big > 0.0);
        }
    }
}
