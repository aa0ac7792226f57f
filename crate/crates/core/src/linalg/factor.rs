//! QR with positive diagonal, unit LU, LU-positivity and pivot selection.

use super::{DenseMatrix, Permutation, SignDiagonal};
use crate::error::{AtlasError, Result};
use crate::tolerance::Tolerances;

/// Householder QR of `a` with the signs normalized so that `R_ii ≥ 0`.
///
/// No singularity check; callers decide what a small pivot means.
pub(crate) fn householder_qr(a: &DenseMatrix) -> (DenseMatrix, DenseMatrix) {
    let n = a.n();
    let mut r = a.clone();
    let mut q = DenseMatrix::identity(n);
    let mut v = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        // reflector built from the column scaled to unit max magnitude
        let scale = (k..n).fold(0.0_f64, |m, i| m.max(r[(i, k)].abs()));
        if scale == 0.0 {
            continue;
        }
        for i in 0..n {
            v[i] = if i < k { 0.0 } else { r[(i, k)] / scale };
        }
        let norm = v[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
        let alpha = if v[k] > 0.0 { -norm } else { norm };
        v[k] -= alpha;
        let vv: f64 = v[k..].iter().map(|x| x * x).sum();
        if vv == 0.0 {
            continue;
        }
        // R ← H R
        for j in k..n {
            let dot: f64 = (k..n).map(|i| v[i] * r[(i, j)]).sum();
            let f = 2.0 * dot / vv;
            for i in k..n {
                r[(i, j)] -= f * v[i];
            }
        }
        for i in k + 1..n {
            r[(i, k)] = 0.0;
        }
        // Q ← Q H
        for i in 0..n {
            let dot: f64 = (k..n).map(|j| q[(i, j)] * v[j]).sum();
            let f = 2.0 * dot / vv;
            for j in k..n {
                q[(i, j)] -= f * v[j];
            }
        }
    }
    for k in 0..n {
        if r[(k, k)] < 0.0 {
            r.scale_row(k, -1.0);
            q.scale_column(k, -1.0);
        }
    }
    (q, r)
}

/// Column scaling factors bringing every column to unit max magnitude.
fn column_scales(m: &DenseMatrix) -> Vec<f64> {
    (0..m.n())
        .map(|j| {
            let c = (0..m.n()).fold(0.0_f64, |acc, i| acc.max(m[(i, j)].abs()));
            if c > 0.0 {
                1.0 / c
            } else {
                1.0
            }
        })
        .collect()
}

/// Orthogonal factor of `m` with columns rescaled first. The Q factor is
/// invariant under right multiplication by a positive diagonal.
pub(crate) fn q_factor_scaled(m: &DenseMatrix) -> (DenseMatrix, DenseMatrix, Vec<f64>) {
    let scales = column_scales(m);
    let mut a = m.clone();
    for (j, &s) in scales.iter().enumerate() {
        a.scale_column(j, s);
    }
    let (q, r) = householder_qr(&a);
    (q, r, scales)
}

/// The unique factorization `M = Q R` with `Q` orthogonal and `R` upper
/// triangular with positive diagonal.
pub fn qr_positive(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    qr_positive_with(m, &Tolerances::default())
}

pub fn qr_positive_with(m: &DenseMatrix, tol: &Tolerances) -> Result<(DenseMatrix, DenseMatrix)> {
    if !m.is_finite() {
        return Err(AtlasError::InvalidInput("non-finite matrix entry".into()));
    }
    let n = m.n();
    let (q, mut r, scales) = q_factor_scaled(m);
    // scaled columns have unit max, so the pivot threshold is absolute here
    let threshold = tol.fact(n, 1.0);
    for k in 0..n {
        if r[(k, k)] <= threshold {
            return Err(AtlasError::SingularMatrix {
                index: k,
                pivot: r[(k, k)],
            });
        }
    }
    for (j, &s) in scales.iter().enumerate() {
        r.scale_column(j, 1.0 / s);
    }
    Ok((q, r))
}

/// Unpivoted Doolittle elimination. Returns `(L, U)` or the index and value of
/// the first pivot whose magnitude is at most `threshold`.
pub(crate) fn doolittle(m: &DenseMatrix, threshold: f64) -> std::result::Result<(DenseMatrix, DenseMatrix), (usize, f64)> {
    let n = m.n();
    let mut u = m.clone();
    let mut l = DenseMatrix::identity(n);
    for k in 0..n {
        let pivot = u[(k, k)];
        if !(pivot.abs() > threshold) {
            return Err((k, pivot));
        }
        for i in k + 1..n {
            let f = u[(i, k)] / pivot;
            l[(i, k)] = f;
            u[(i, k)] = 0.0;
            for j in k + 1..n {
                u[(i, j)] -= f * u[(k, j)];
            }
        }
    }
    Ok((l, u))
}

/// `M = L U` with `L` unit lower triangular.
pub fn lu_unit(m: &DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    lu_unit_with(m, &Tolerances::default())
}

pub fn lu_unit_with(m: &DenseMatrix, tol: &Tolerances) -> Result<(DenseMatrix, DenseMatrix)> {
    let threshold = 1e-14 * tol.scale * m.norm_inf();
    doolittle(m, threshold).map_err(|(index, pivot)| AtlasError::PivotBreakdown { index, pivot })
}

/// True iff every leading principal minor of `m` is positive.
pub fn is_lu_positive(m: &DenseMatrix) -> bool {
    match doolittle(m, 0.0) {
        Ok((_, u)) => (0..m.n()).all(|k| u[(k, k)] > 0.0),
        Err(_) => false,
    }
}

/// The unique sign diagonal `E` making `E M` LU-positive.
pub fn sign_fix_lu_positive(m: &DenseMatrix) -> Result<SignDiagonal> {
    let (_, u) = lu_unit(m)?;
    Ok(signs_of_pivots(&u))
}

pub(crate) fn signs_of_pivots(u: &DenseMatrix) -> SignDiagonal {
    let signs = (0..u.n()).map(|k| if u[(k, k)] < 0.0 { -1 } else { 1 }).collect();
    SignDiagonal::new(signs).expect("signs are ±1")
}

/// Row permutation chosen by partially pivoted elimination: the returned `π`
/// makes every leading principal minor of `P_π⁻¹ Q` nonzero. Row `i` of
/// `P_π⁻¹ Q` is row `π(i)` of `Q`.
pub fn plu_select(q: &DenseMatrix) -> Result<Permutation> {
    plu_select_restricted(q, &[])
}

/// As [`plu_select`], but the rows listed in `last` are forced to the end in
/// the given order and only the remaining rows are pivoted.
pub(crate) fn plu_select_restricted(q: &DenseMatrix, last: &[usize]) -> Result<Permutation> {
    let n = q.n();
    let threshold = 1e-14 * q.norm_inf();
    let mut a = q.clone();
    let mut rows: Vec<usize> = (0..n).collect();
    let free = n - last.len();
    // move the forced rows to the bottom
    let mut order: Vec<usize> = (0..n).filter(|i| !last.contains(i)).collect();
    order.extend_from_slice(last);
    let mut b = DenseMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for j in 0..n {
            b[(dst, j)] = a[(src, j)];
        }
        rows[dst] = src;
    }
    a = b;
    for k in 0..n {
        let candidates = if k < free { k..free } else { k..k + 1 };
        let p = candidates
            .max_by(|&x, &y| a[(x, k)].abs().total_cmp(&a[(y, k)].abs()))
            .unwrap();
        if !(a[(p, k)].abs() > threshold) {
            return Err(AtlasError::SingularMatrix {
                index: k,
                pivot: a[(p, k)],
            });
        }
        a.swap_rows(p, k);
        rows.swap(p, k);
        for i in k + 1..n {
            let f = a[(i, k)] / a[(k, k)];
            for j in k..n {
                a[(i, j)] -= f * a[(k, j)];
            }
        }
    }
    Permutation::new(rows)
}
