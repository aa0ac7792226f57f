use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::error::{AtlasError, Result};

/// Real symmetric tridiagonal matrix stored as its diagonal and subdiagonal.
///
/// `off[i]` is the entry at `(i + 1, i)` (and `(i, i + 1)`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(AtlasError::Dimension("empty diagonal".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(AtlasError::Dimension(format!(
                "diagonal has {} entries but off-diagonal has {}",
                diag.len(),
                off.len()
            )));
        }
        if diag.iter().chain(&off).any(|x| !x.is_finite()) {
            return Err(AtlasError::InvalidInput("non-finite matrix entry".into()));
        }
        Ok(Self { diag, off })
    }

    pub fn diagonal(values: &[f64]) -> Self {
        Self {
            diag: values.to_vec(),
            off: vec![0.0; values.len().saturating_sub(1)],
        }
    }

    /// Reads the tridiagonal band of a dense matrix, averaging the two
    /// off-diagonal copies.
    pub fn from_dense_band(m: &DenseMatrix) -> Self {
        let n = m.n();
        let diag = (0..n).map(|i| m[(i, i)]).collect();
        let off = (0..n.saturating_sub(1))
            .map(|i| 0.5 * (m[(i + 1, i)] + m[(i, i + 1)]))
            .collect();
        Self { diag, off }
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn off(&self) -> &[f64] {
        &self.off
    }

    pub fn off_mut(&mut self) -> &mut [f64] {
        &mut self.off
    }

    pub fn diag_mut(&mut self) -> &mut [f64] {
        &mut self.diag
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.n();
        let mut m = DenseMatrix::zeros(n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
        }
        for (i, &b) in self.off.iter().enumerate() {
            m[(i + 1, i)] = b;
            m[(i, i + 1)] = b;
        }
        m
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// `tr(T²)`, i.e. the squared Frobenius norm.
    pub fn trace_sq(&self) -> f64 {
        self.diag.iter().map(|a| a * a).sum::<f64>() + 2.0 * self.off.iter().map(|b| b * b).sum::<f64>()
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        let n = self.n();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &SymTridiagonal) -> f64 {
        assert_eq!(self.n(), other.n());
        self.diag
            .iter()
            .zip(&other.diag)
            .chain(self.off.iter().zip(&other.off))
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn is_jacobi(&self) -> bool {
        self.off.iter().all(|&b| b > 0.0)
    }

    pub fn is_unreduced(&self) -> bool {
        self.off.iter().all(|&b| b != 0.0)
    }

    /// Index and value of the first off-diagonal entry that is not positive.
    pub fn require_jacobi(&self) -> Result<()> {
        match self.off.iter().position(|&b| b <= 0.0) {
            Some(index) => Err(AtlasError::NotJacobi {
                index,
                value: self.off[index],
            }),
            None => Ok(()),
        }
    }
}
