use super::{ChartPoint, PermutedSpectrum, Spectrum};
use crate::error::{AtlasError, Result};
use crate::linalg::{
    doolittle, householder_qr, plu_select, plu_select_restricted, signs_of_pivots, sym_tridiag_eigen_with, DenseMatrix,
    Permutation, SymTridiagonal, TridiagEigen,
};
use crate::tolerance::Tolerances;

/// Coordinates above this magnitude are rejected by the inverse chart.
pub const BETA_LIMIT: f64 = 1e12;

/// `T = Qᵀ Λ^π Q` with `Q` orthogonal and LU-positive, plus `Q = L U`.
#[derive(Debug, Clone)]
pub struct NormalizedDiagonalization {
    pub q: DenseMatrix,
    pub l: DenseMatrix,
    pub u: DenseMatrix,
    /// `λ_{π(1)}, …, λ_{π(n)}`.
    pub lambda_pi: Vec<f64>,
}

pub(crate) fn eigen_matching(spec: &Spectrum, t: &SymTridiagonal) -> Result<TridiagEigen> {
    if t.n() != spec.n() {
        return Err(AtlasError::Dimension(format!(
            "matrix of size {} for a spectrum of size {}",
            t.n(),
            spec.n()
        )));
    }
    let tol = spec.tolerances();
    let eig = match sym_tridiag_eigen_with(t, tol) {
        Ok(e) => e,
        Err(AtlasError::DegenerateSpectrum { .. }) => {
            // a degenerate matrix cannot be conjugate to a simple spectrum
            return Err(AtlasError::SpectrumMismatch {
                deviation: spec.gamma(),
            });
        }
        Err(e) => return Err(e),
    };
    let deviation = eig
        .values
        .iter()
        .zip(spec.lambdas())
        .fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    if deviation > tol.eig(t.norm_inf().max(spec.norm())) {
        return Err(AtlasError::SpectrumMismatch { deviation });
    }
    Ok(eig)
}

fn normalize_from_eigen(
    eig: &TridiagEigen,
    lambdas: &[f64],
    pi: &Permutation,
    tol: &Tolerances,
) -> Result<NormalizedDiagonalization> {
    let n = lambdas.len();
    if pi.n() != n {
        return Err(AtlasError::Dimension("permutation size differs from matrix size".into()));
    }
    // row i is the eigenvector of λ_{π(i)}
    let reordered = DenseMatrix::from_fn(n, |i, j| eig.vectors[(pi.apply(i), j)]);
    let (l, u) = doolittle(&reordered, tol.sing()).map_err(|_| AtlasError::NotInChart { pi: pi.to_string() })?;
    let e = signs_of_pivots(&u);
    // L(EM) = E L(M) E and U(EM) = E U(M)
    let q = e.apply_rows(&reordered);
    let u = e.apply_rows(&u);
    let mut l = l;
    for i in 0..n {
        for j in 0..i {
            l[(i, j)] *= e.sign(i) * e.sign(j);
        }
    }
    Ok(NormalizedDiagonalization {
        q,
        l,
        u,
        lambda_pi: pi.rearrange(lambdas),
    })
}

/// The π-normalized diagonalization of `t`, using the spectrum of `t` itself.
pub fn normalized_diagonalization(t: &SymTridiagonal, pi: &Permutation) -> Result<NormalizedDiagonalization> {
    let tol = Tolerances::default();
    let eig = sym_tridiag_eigen_with(t, &tol)?;
    normalize_from_eigen(&eig, &eig.values, pi, &tol)
}

pub(crate) fn normalized_in(spec: &Spectrum, pi: &Permutation, t: &SymTridiagonal) -> Result<NormalizedDiagonalization> {
    let eig = eigen_matching(spec, t)?;
    normalize_from_eigen(&eig, spec.lambdas(), pi, spec.tolerances())
}

/// Bidiagonal coordinates of `t` in the chart of `pi`.
///
/// `β_j = T_{j+1,j} U_{j+1,j+1} / U_{jj}` with `U = U(Q_π)`. This equals
/// `(λ_{j+1}^π − λ_j^π)(L_π)_{j+1,j}` but keeps relative accuracy when the
/// off-diagonal entry is tiny, and `sign(β_j) = sign(T_{j+1,j})` exactly.
pub fn psi(spec: &Spectrum, pi: &Permutation, t: &SymTridiagonal) -> Result<ChartPoint> {
    let nd = normalized_in(spec, pi, t)?;
    let beta = (0..spec.n().saturating_sub(1))
        .map(|j| t.off()[j] * (nd.u[(j + 1, j + 1)] / nd.u[(j, j)]))
        .collect();
    Ok(ChartPoint { pi: pi.clone(), beta })
}

/// Coordinates from the subdiagonal of `L_π`: `β_j = (λ_{j+1}^π − λ_j^π)(L_π)_{j+1,j}`.
pub fn psi_from_l(spec: &Spectrum, pi: &Permutation, t: &SymTridiagonal) -> Result<ChartPoint> {
    let nd = normalized_in(spec, pi, t)?;
    let lp = &nd.lambda_pi;
    let beta = (0..spec.n().saturating_sub(1))
        .map(|j| (lp[j + 1] - lp[j]) * nd.l[(j + 1, j)])
        .collect();
    Ok(ChartPoint { pi: pi.clone(), beta })
}

/// Coordinates from the full product `L_π⁻¹ Λ^π L_π`, reading its
/// subdiagonal. Slower than [`psi`]; kept as an independent route.
pub fn psi_via_bidiagonal(spec: &Spectrum, pi: &Permutation, t: &SymTridiagonal) -> Result<(ChartPoint, DenseMatrix)> {
    let nd = normalized_in(spec, pi, t)?;
    let n = spec.n();
    let l_inv = unit_lower_inverse(&nd.l);
    let b = &(&l_inv * &DenseMatrix::from_diag(&nd.lambda_pi)) * &nd.l;
    let beta = (0..n.saturating_sub(1)).map(|j| b[(j + 1, j)]).collect();
    Ok((ChartPoint { pi: pi.clone(), beta }, b))
}

fn unit_lower_inverse(l: &DenseMatrix) -> DenseMatrix {
    let n = l.n();
    let mut inv = DenseMatrix::identity(n);
    for j in 0..n {
        for i in j + 1..n {
            let s: f64 = (j..i).map(|k| l[(i, k)] * inv[(k, j)]).sum();
            inv[(i, j)] = -s;
        }
    }
    inv
}

fn check_beta(lp: &PermutedSpectrum, beta: &[f64]) -> Result<()> {
    if beta.len() + 1 != lp.n() {
        return Err(AtlasError::Dimension(format!(
            "{} coordinates for a chart of size {}",
            beta.len(),
            lp.n()
        )));
    }
    if let Some(b) = beta.iter().find(|b| !b.is_finite() || b.abs() > BETA_LIMIT) {
        return Err(AtlasError::Overflow(format!("chart coordinate {b:e} exceeds {BETA_LIMIT:e}")));
    }
    Ok(())
}

/// `log|L_ij|` and `sign(L_ij)` for `i > j`; `None` when the entry is zero.
fn l_entry_log(lp: &[f64], beta: &[f64], i: usize, j: usize) -> Option<(f64, f64)> {
    let mut log = 0.0;
    let mut sign = 1.0;
    for k in j..i {
        if beta[k] == 0.0 {
            return None;
        }
        let gap = lp[i] - lp[k];
        log += beta[k].abs().ln() - gap.abs().ln();
        sign *= beta[k].signum() * gap.signum();
    }
    Some((log, sign))
}

/// `L_π` in closed form: `L_ij = ∏_{k=j}^{i-1} β_k / (λ_i^π − λ_k^π)` below the diagonal.
pub fn build_l(lp: &PermutedSpectrum, beta: &[f64]) -> Result<DenseMatrix> {
    check_beta(lp, beta)?;
    let v = lp.values();
    let n = lp.n();
    let mut l = DenseMatrix::identity(n);
    for j in 0..n {
        for i in j + 1..n {
            l[(i, j)] = (j..i).map(|k| beta[k] / (v[i] - v[k])).product();
        }
    }
    if !l.is_finite() {
        return Err(AtlasError::Overflow("entries of L overflow".into()));
    }
    Ok(l)
}

/// `L_π` with every column divided by its largest magnitude, and the logs of those magnitudes.
fn build_l_scaled(lp: &PermutedSpectrum, beta: &[f64]) -> (DenseMatrix, Vec<f64>) {
    let v = lp.values();
    let n = lp.n();
    let mut l = DenseMatrix::zeros(n);
    let mut tops = Vec::with_capacity(n);
    for j in 0..n {
        let logs: Vec<Option<(f64, f64)>> = (j + 1..n).map(|i| l_entry_log(v, beta, i, j)).collect();
        let top = logs.iter().flatten().fold(0.0_f64, |m, (log, _)| m.max(*log));
        l[(j, j)] = (-top).exp();
        for (offset, entry) in logs.into_iter().enumerate() {
            if let Some((log, sign)) = entry {
                l[(j + 1 + offset, j)] = sign * (log - top).exp();
            }
        }
        tops.push(top);
    }
    (l, tops)
}

/// The inverse chart: `φ_π(β) = Q(L_π)ᵀ Λ^π Q(L_π)`.
///
/// The diagonal comes from the conjugation; the off-diagonal entries use
/// `T_{j+1,j} = β_j R_{j+1,j+1} / R_{jj}` with `R = R(L_π)`, which holds since
/// `T = R B_π R⁻¹`.
pub fn phi(spec: &Spectrum, pi: &Permutation, beta: &[f64]) -> Result<SymTridiagonal> {
    let lp = spec.permuted(pi);
    check_beta(&lp, beta)?;
    let (l, tops) = build_l_scaled(&lp, beta);
    let (q, r) = householder_qr(&l);
    let mut t = conjugate_diag(&q, lp.values());
    for (j, b) in t.off_mut().iter_mut().enumerate() {
        *b = beta[j] * (r[(j + 1, j + 1)] / r[(j, j)]) * (tops[j + 1] - tops[j]).exp();
    }
    Ok(t)
}

/// Tridiagonal band of `Qᵀ diag(d) Q`.
pub(crate) fn conjugate_diag(q: &DenseMatrix, d: &[f64]) -> SymTridiagonal {
    let n = q.n();
    let entry = |i: usize, j: usize| -> f64 { (0..n).map(|k| q[(k, i)] * d[k] * q[(k, j)]).sum() };
    let diag = (0..n).map(|i| entry(i, i)).collect();
    let off = (0..n.saturating_sub(1)).map(|i| entry(i + 1, i)).collect();
    SymTridiagonal::new(diag, off).expect("finite conjugation")
}

/// `q_i^π(T) = β_i^π(T) / T_{i+1,i}`, evaluated as the pivot ratio
/// `U_{i+1,i+1} / U_{ii}` of the normalized diagonalization, which stays
/// valid where `T_{i+1,i}` vanishes.
pub fn q_ratio(spec: &Spectrum, pi: &Permutation, t: &SymTridiagonal, i: usize) -> Result<f64> {
    if i + 1 >= spec.n() {
        return Err(AtlasError::Dimension(format!("no coordinate {i} in a chart of size {}", spec.n())));
    }
    let nd = normalized_in(spec, pi, t)?;
    Ok(nd.u[(i + 1, i + 1)] / nd.u[(i, i)])
}

/// Contiguous unreduced blocks of `t`, split where `|b_i| ≤ threshold`.
pub(crate) fn blocks(t: &SymTridiagonal, threshold: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for (i, b) in t.off().iter().enumerate() {
        if b.abs() <= threshold {
            out.push(start..i + 1);
            start = i + 1;
        }
    }
    out.push(start..t.n());
    out
}

pub(crate) fn block_spectrum(t: &SymTridiagonal, range: std::ops::Range<usize>, threshold: f64) -> Vec<f64> {
    let diag = t.diag()[range.clone()].to_vec();
    let off: Vec<f64> = t.off()[range.start..range.end - 1]
        .iter()
        .map(|&b| if b.abs() <= threshold { 0.0 } else { b })
        .collect();
    let block = SymTridiagonal::new(diag, off).expect("sub-block of a valid matrix");
    (0..block.n()).map(|k| crate::linalg::bisect_eigenvalue(&block, k)).collect()
}

/// Whether `t` lies in the chart domain of `pi`: each unreduced block must
/// carry exactly the eigenvalues of the matching segment of `Λ^π`.
pub fn chart_contains(spec: &Spectrum, pi: &Permutation, t: &SymTridiagonal) -> Result<bool> {
    eigen_matching(spec, t)?;
    let tol = spec.tolerances();
    let norm = t.norm_inf().max(spec.norm());
    let threshold = tol.block(norm);
    let lp = spec.permuted(pi);
    for range in blocks(t, threshold) {
        let got = block_spectrum(t, range.clone(), threshold);
        let mut want = lp.values()[range].to_vec();
        want.sort_by(f64::total_cmp);
        if got.iter().zip(&want).any(|(a, b)| (a - b).abs() > tol.eig(norm)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Canonical chart for `t`: partial pivoting on its eigenvector matrix.
pub fn select_chart(spec: &Spectrum, t: &SymTridiagonal) -> Result<Permutation> {
    let eig = eigen_matching(spec, t)?;
    plu_select(&eig.vectors)
}

/// A chart containing `t` whose last position carries eigenvalue `k`
/// (`π(n) = k`), if one exists.
pub fn select_chart_ending_at(spec: &Spectrum, t: &SymTridiagonal, k: usize) -> Result<Permutation> {
    let eig = eigen_matching(spec, t)?;
    let pi = plu_select_restricted(&eig.vectors, &[k]).map_err(|_| AtlasError::NotInChart {
        pi: format!("(…,{})", k + 1),
    })?;
    // the restricted pivoting can accept a tiny last pivot; confirm membership
    normalize_from_eigen(&eig, spec.lambdas(), &pi, spec.tolerances())?;
    Ok(pi)
}
