use serde::{Deserialize, Serialize};

use super::atlas::{block_spectrum, blocks, eigen_matching};
use super::Spectrum;
use crate::error::Result;
use crate::linalg::{SignDiagonal, SymTridiagonal};
use crate::tolerance::Tolerances;

/// Signs of the off-diagonal entries, with entries at or below the block
/// tolerance reported as 0.
pub fn sign_sequence(t: &SymTridiagonal) -> Vec<i8> {
    sign_sequence_with(t, &Tolerances::default())
}

pub fn sign_sequence_with(t: &SymTridiagonal, tol: &Tolerances) -> Vec<i8> {
    let threshold = tol.block(t.norm_inf());
    t.off()
        .iter()
        .map(|&b| {
            if b.abs() <= threshold {
                0
            } else if b > 0.0 {
                1
            } else {
                -1
            }
        })
        .collect()
}

/// The open cell of a matrix: unreduced blocks, their spectra and the signs
/// of the surviving off-diagonal entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellDescriptor {
    /// Half-open index ranges `[start, end)` of the unreduced blocks.
    pub blocks: Vec<(usize, usize)>,
    /// Ascending spectrum of each block.
    pub subspectra: Vec<Vec<f64>>,
    /// One entry per off-diagonal position: ±1 inside a block, 0 at a split.
    pub signs: Vec<i8>,
}

impl CellDescriptor {
    pub fn n(&self) -> usize {
        self.blocks.last().map_or(0, |b| b.1)
    }

    /// `n − k` for `k` blocks.
    pub fn dimension(&self) -> usize {
        self.n() - self.blocks.len()
    }
}

pub fn cell_of(t: &SymTridiagonal, spec: &Spectrum) -> Result<CellDescriptor> {
    eigen_matching(spec, t)?;
    let tol = spec.tolerances();
    let threshold = tol.block(t.norm_inf());
    let ranges = blocks(t, threshold);
    let subspectra = ranges.iter().map(|r| block_spectrum(t, r.clone(), threshold)).collect();
    Ok(CellDescriptor {
        blocks: ranges.iter().map(|r| (r.start, r.end)).collect(),
        subspectra,
        signs: sign_sequence_with(t, tol),
    })
}

/// `E T E`.
pub fn conjugate_by_sign(e: &SignDiagonal, t: &SymTridiagonal) -> SymTridiagonal {
    e.conjugate(t)
}

/// Diagonal of `Q Λ Qᵀ` where `T = Qᵀ Λ Q`.
pub fn moment_map(t: &SymTridiagonal, spec: &Spectrum) -> Result<Vec<f64>> {
    let eig = eigen_matching(spec, t)?;
    let n = t.n();
    let l = spec.lambdas();
    Ok((0..n)
        .map(|i| (0..n).map(|k| eig.vectors[(i, k)].powi(2) * l[k]).sum())
        .collect())
}

/// Whether `x` is majorized by `lambdas` (equal sums, dominated partial sums
/// of the decreasing rearrangements), up to `tol`.
pub fn is_majorized_by(x: &[f64], lambdas: &[f64], tol: f64) -> bool {
    if x.len() != lambdas.len() {
        return false;
    }
    let mut a = x.to_vec();
    let mut b = lambdas.to_vec();
    a.sort_by(|p, q| q.total_cmp(p));
    b.sort_by(|p, q| q.total_cmp(p));
    let (mut sa, mut sb) = (0.0, 0.0);
    for (p, q) in a.iter().zip(&b) {
        sa += p;
        sb += q;
        if sa > sb + tol {
            return false;
        }
    }
    (sa - sb).abs() <= tol
}
