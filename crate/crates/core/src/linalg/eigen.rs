//! Symmetric tridiagonal eigensolver: Sturm-sequence bisection for the
//! eigenvalues, inverse iteration for the eigenvectors.

use super::{DenseMatrix, SymTridiagonal};
use crate::error::{AtlasError, Result};
use crate::tolerance::Tolerances;

/// Ascending eigenvalues and the orthogonal matrix whose row `i` is the unit
/// eigenvector of `values[i]`, so `T = Qᵀ diag(values) Q`.
#[derive(Debug, Clone)]
pub struct TridiagEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
    /// Smallest distance between consecutive eigenvalues (infinite for n = 1).
    pub gap: f64,
}

impl TridiagEigen {
    /// `‖Q T Qᵀ − diag(values)‖` in the max-abs sense.
    pub fn residual(&self, t: &SymTridiagonal) -> f64 {
        let q = &self.vectors;
        let d = &(q * &t.to_dense()) * &q.transpose();
        d.max_abs_diff(&DenseMatrix::from_diag(&self.values))
    }
}

/// Number of eigenvalues of `t` strictly below `x`.
pub fn sturm_count(t: &SymTridiagonal, x: f64) -> usize {
    let a = t.diag();
    let b = t.off();
    let tiny = f64::EPSILON * f64::EPSILON * t.norm_inf().max(f64::MIN_POSITIVE);
    let mut count = 0;
    let mut d = a[0] - x;
    for i in 0..a.len() {
        if i > 0 {
            d = a[i] - x - b[i - 1] * b[i - 1] / d;
        }
        if d == 0.0 {
            d = -tiny;
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(t: &SymTridiagonal) -> (f64, f64) {
    let n = t.n();
    let (a, b) = (t.diag(), t.off());
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += b[i - 1].abs();
        }
        if i + 1 < n {
            r += b[i].abs();
        }
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    let pad = f64::EPSILON * (lo.abs().max(hi.abs())).max(f64::MIN_POSITIVE) * n as f64;
    (lo - pad, hi + pad)
}

/// The `k`-th smallest eigenvalue (0-based) by bisection.
pub fn bisect_eigenvalue(t: &SymTridiagonal, k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(t);
    for _ in 0..256 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Solves `(T − μ I) x = rhs` by Gaussian elimination with partial pivoting on
/// the tridiagonal band; pivots smaller than `tiny` in magnitude are raised to
/// `tiny`, keeping the iterates finite.
fn shifted_solve(t: &SymTridiagonal, mu: f64, rhs: &[f64], tiny: f64) -> Vec<f64> {
    let n = t.n();
    let (a, b) = (t.diag(), t.off());
    // row i holds entries at columns i, i+1, i+2 after elimination
    let mut d: Vec<f64> = a.iter().map(|x| x - mu).collect();
    let mut du: Vec<f64> = b.to_vec();
    let mut dl: Vec<f64> = b.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut x = rhs.to_vec();
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            d[i] = guard(d[i], tiny);
            let f = dl[i] / d[i];
            d[i + 1] -= f * du[i];
            x[i + 1] -= f * x[i];
        } else {
            // swap rows i and i+1
            let f = d[i] / dl[i];
            d[i] = dl[i];
            let tmp = d[i + 1];
            d[i + 1] = du[i] - f * tmp;
            du[i] = tmp;
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
            x.swap(i, i + 1);
            x[i + 1] -= f * x[i];
        }
        dl[i] = 0.0;
    }
    for p in d.iter_mut() {
        *p = guard(*p, tiny);
    }
    // back substitution
    x[n - 1] /= d[n - 1];
    if n > 1 {
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
    }
    x
}

fn guard(pivot: f64, tiny: f64) -> f64 {
    if pivot.abs() < tiny {
        tiny.copysign(pivot)
    } else {
        pivot
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let scale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return 0.0;
    }
    for x in v.iter_mut() {
        *x /= scale;
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    norm * scale
}

/// Full eigendecomposition of a symmetric tridiagonal matrix.
///
/// Fails with `DegenerateSpectrum` when two eigenvalues are closer than the
/// gap tolerance.
pub fn sym_tridiag_eigen(t: &SymTridiagonal) -> Result<TridiagEigen> {
    sym_tridiag_eigen_with(t, &Tolerances::default())
}

pub fn sym_tridiag_eigen_with(t: &SymTridiagonal, tol: &Tolerances) -> Result<TridiagEigen> {
    let n = t.n();
    let norm = t.norm_inf();
    let values: Vec<f64> = (0..n).map(|k| bisect_eigenvalue(t, k)).collect();
    let gap = values
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    let gap_tol = tol.gap(norm);
    if n > 1 && gap <= gap_tol {
        return Err(AtlasError::DegenerateSpectrum { gap, tol: gap_tol });
    }
    let vectors = eigenvectors(t, &values);
    Ok(TridiagEigen { values, vectors, gap })
}

/// Eigenvectors for known simple eigenvalues, as rows.
fn eigenvectors(t: &SymTridiagonal, values: &[f64]) -> DenseMatrix {
    let n = t.n();
    let norm = t.norm_inf().max(f64::MIN_POSITIVE);
    let tiny = f64::EPSILON * norm;
    let mut q = DenseMatrix::zeros(n);
    for (k, &lambda) in values.iter().enumerate() {
        // deterministic start vector with no special structure
        let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7 + k * 3) % 11) as f64).collect();
        normalize(&mut v);
        for _ in 0..3 {
            v = shifted_solve(t, lambda, &v, tiny);
            normalize(&mut v);
        }
        // one reorthogonalization pass against the vectors already found
        for j in 0..k {
            let dot: f64 = (0..n).map(|i| q[(j, i)] * v[i]).sum();
            for (i, x) in v.iter_mut().enumerate() {
                *x -= dot * q[(j, i)];
            }
        }
        normalize(&mut v);
        for (i, x) in v.into_iter().enumerate() {
            q[(k, i)] = x;
        }
    }
    q
}
