use super::atlas::conjugate_diag;
use super::{NormingVector, PermutedSpectrum, Spectrum};
use crate::error::{AtlasError, Result};
use crate::linalg::{doolittle, householder_qr, signs_of_pivots, sym_tridiag_eigen_with, DenseMatrix, Permutation, SymTridiagonal};

/// Norming constants `|(Q_π)_{i1}|` of a Jacobi matrix, listed in the order of `pi`.
pub fn norming_constants(j: &SymTridiagonal, pi: &Permutation) -> Result<NormingVector> {
    j.require_jacobi()?;
    if pi.n() != j.n() {
        return Err(AtlasError::Dimension("permutation size differs from matrix size".into()));
    }
    let eig = sym_tridiag_eigen_with(j, &Default::default())?;
    let weights = pi.images().iter().map(|&k| eig.vectors[(k, 0)].abs()).collect();
    NormingVector::new(pi.clone(), weights)
}

/// Chebyshev polynomials `T_0..T_{n-1}` at `x`.
fn chebyshev_row(x: f64, n: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(n);
    for k in 0..n {
        row.push(match k {
            0 => 1.0,
            1 => x,
            _ => 2.0 * x * row[k - 1] - row[k - 2],
        });
    }
    row
}

/// The Jacobi matrix with spectrum `Λ` and norming constants `w`.
///
/// `Q = Q(E W V)` where `V` is a Vandermonde-type matrix on `Λ^π` and `E`
/// makes `E W V` LU-positive; the result is `Qᵀ Λ^π Q`. `V` uses Chebyshev
/// polynomials on the eigenvalues mapped to `[-1, 1]`: the column spans match
/// the monomial basis, so `Q` is unchanged, but the conditioning is far better.
pub fn jacobi_from_data(lp: &PermutedSpectrum, w: &NormingVector) -> Result<SymTridiagonal> {
    let n = lp.n();
    if w.weights().len() != n {
        return Err(AtlasError::Dimension("norming vector and spectrum differ in length".into()));
    }
    let values = lp.values();
    if n == 1 {
        return Ok(SymTridiagonal::diagonal(values));
    }
    let w = w.reindex(lp.pi());
    let lambdas = lp.base().lambdas();
    let (lo, hi) = (lambdas[0], lambdas[n - 1]);
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut m = DenseMatrix::zeros(n);
    for i in 0..n {
        let row = chebyshev_row((values[i] - centre) / half, n);
        for (j, v) in row.into_iter().enumerate() {
            m[(i, j)] = w.weights()[i] * v;
        }
    }
    let (_, u) = doolittle(&m, 0.0).map_err(|(index, pivot)| AtlasError::PivotBreakdown { index, pivot })?;
    let m = signs_of_pivots(&u).apply_rows(&m);
    let (q, _) = householder_qr(&m);
    let mut j = conjugate_diag(&q, values);
    // the sign pattern is exact in exact arithmetic; strip rounding noise
    for b in j.off_mut() {
        *b = b.abs();
    }
    Ok(j)
}

fn gap_log(v: &[f64], i: usize, k: usize) -> f64 {
    (v[i] - v[k]).abs().ln()
}

/// Bidiagonal coordinates of the Jacobi matrix with data `(Λ, w)` in the chart of `pi`.
pub fn beta_from_norming(spec: &Spectrum, pi: &Permutation, w: &NormingVector) -> Result<Vec<f64>> {
    let n = spec.n();
    if pi.n() != n || w.weights().len() != n {
        return Err(AtlasError::Dimension("inconsistent sizes".into()));
    }
    let v = pi.rearrange(spec.lambdas());
    let wt = w.reindex(pi);
    let lw: Vec<f64> = wt.weights().iter().map(|x| x.ln()).collect();
    let beta = (0..n - 1)
        .map(|i| {
            let up: f64 = (0..=i).map(|k| gap_log(&v, i + 1, k)).sum();
            let down: f64 = (0..i).map(|k| gap_log(&v, i, k)).sum();
            (up - down + lw[i + 1] - lw[i]).exp()
        })
        .collect();
    Ok(beta)
}

/// Norming constants (in the order of `pi`) from bidiagonal coordinates; inverse of [`beta_from_norming`].
pub fn norming_from_beta(spec: &Spectrum, pi: &Permutation, beta: &[f64]) -> Result<NormingVector> {
    let n = spec.n();
    if pi.n() != n || beta.len() + 1 != n {
        return Err(AtlasError::Dimension("inconsistent sizes".into()));
    }
    if let Some(b) = beta.iter().find(|b| !(b.abs() > 0.0) || !b.is_finite()) {
        return Err(AtlasError::InvalidInput(format!("coordinate {b} is not a nonzero finite number")));
    }
    let v = pi.rearrange(spec.lambdas());
    let mut logs = vec![0.0; n];
    let mut beta_sum = 0.0;
    for i in 1..n {
        beta_sum += beta[i - 1].abs().ln();
        logs[i] = beta_sum - (0..i).map(|k| gap_log(&v, i, k)).sum::<f64>();
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    NormingVector::new(pi.clone(), logs.iter().map(|l| (l - top).exp()).collect())
}
