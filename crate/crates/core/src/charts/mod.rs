//! The atlas: chart domains, bidiagonal coordinates, norming constants, cells
//! and the moment map.
//!
//! For a permutation `π` the chart `ψ_π` sends a matrix `T = Q_πᵀ Λ^π Q_π`
//! (with `Q_π` orthogonal and LU-positive) to the subdiagonal of the lower
//! bidiagonal matrix `L_π⁻¹ Λ^π L_π`, where `L_π` is the unit lower factor of
//! `Q_π`. The inverse chart rebuilds `L_π` in closed form and takes the
//! orthogonal factor of its QR decomposition.

mod atlas;
mod cells;
mod norming;

use serde::{Deserialize, Serialize};

use crate::error::{AtlasError, Result};
use crate::linalg::Permutation;
use crate::tolerance::Tolerances;

pub use atlas::{
    build_l, chart_contains, normalized_diagonalization, phi, psi, psi_from_l, psi_via_bidiagonal, q_ratio, select_chart,
    select_chart_ending_at, NormalizedDiagonalization, BETA_LIMIT,
};
pub(crate) use atlas::conjugate_diag;
pub use cells::{cell_of, conjugate_by_sign, is_majorized_by, moment_map, sign_sequence, sign_sequence_with, CellDescriptor};
pub use norming::{beta_from_norming, jacobi_from_data, norming_constants, norming_from_beta};

/// A simple spectrum `λ_1 < … < λ_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    lambdas: Vec<f64>,
    gamma: f64,
    tol: Tolerances,
}

impl Spectrum {
    /// Sorts `values` and rejects repeated (or nearly repeated) entries.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_tolerances(values, Tolerances::default())
    }

    pub fn with_tolerances(mut values: Vec<f64>, tol: Tolerances) -> Result<Self> {
        if values.is_empty() {
            return Err(AtlasError::Dimension("empty spectrum".into()));
        }
        if values.iter().any(|x| !x.is_finite()) {
            return Err(AtlasError::InvalidInput("non-finite eigenvalue".into()));
        }
        values.sort_by(f64::total_cmp);
        let gamma = values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
        let norm = values.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let gap_tol = tol.gap(norm);
        if values.len() > 1 && gamma <= gap_tol {
            return Err(AtlasError::DegenerateSpectrum { gap: gamma, tol: gap_tol });
        }
        Ok(Self {
            lambdas: values,
            gamma,
            tol,
        })
    }

    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Minimal distance between eigenvalues; infinite when `n = 1`.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    /// Max-abs eigenvalue, the scale for all spectrum-relative tolerances.
    pub fn norm(&self) -> f64 {
        self.lambdas.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn permuted(&self, pi: &Permutation) -> PermutedSpectrum {
        assert_eq!(pi.n(), self.n(), "permutation size differs from spectrum size");
        PermutedSpectrum {
            values: pi.rearrange(&self.lambdas),
            base: self.clone(),
            pi: pi.clone(),
        }
    }

    /// Index of the eigenvalue nearest to `x`, with its distance.
    pub fn nearest(&self, x: f64) -> (usize, f64) {
        self.lambdas
            .iter()
            .enumerate()
            .map(|(i, l)| (i, (l - x).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("spectrum is non-empty")
    }
}

/// `Λ^π = diag(λ_{π(1)}, …, λ_{π(n)})`.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutedSpectrum {
    base: Spectrum,
    pi: Permutation,
    values: Vec<f64>,
}

impl PermutedSpectrum {
    pub fn base(&self) -> &Spectrum {
        &self.base
    }

    pub fn pi(&self) -> &Permutation {
        &self.pi
    }

    /// `λ_i^π` in order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// A permutation together with bidiagonal coordinates in its chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub pi: Permutation,
    pub beta: Vec<f64>,
}

impl ChartPoint {
    pub fn new(pi: Permutation, beta: Vec<f64>) -> Result<Self> {
        if beta.len() + 1 != pi.n() {
            return Err(AtlasError::Dimension(format!(
                "{} coordinates for a chart of size {}",
                beta.len(),
                pi.n()
            )));
        }
        if beta.iter().any(|b| !b.is_finite()) {
            return Err(AtlasError::InvalidInput("non-finite chart coordinate".into()));
        }
        Ok(Self { pi, beta })
    }

    pub fn origin(pi: Permutation) -> Self {
        let n = pi.n();
        Self {
            pi,
            beta: vec![0.0; n.saturating_sub(1)],
        }
    }
}

/// Norming constants: positive, unit-norm weights, one per eigenvalue.
///
/// Entry `i` belongs to eigenvalue `λ_{order(i)}`; for the identity order this
/// is the usual listing by increasing eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct NormingVector {
    order: Permutation,
    weights: Vec<f64>,
}

impl NormingVector {
    /// Normalizes `weights` to unit length; every entry must be positive.
    pub fn new(order: Permutation, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != order.n() {
            return Err(AtlasError::Dimension("weights and order differ in length".into()));
        }
        if let Some(i) = weights.iter().position(|&w| !(w > 0.0) || !w.is_finite()) {
            return Err(AtlasError::InvalidInput(format!("norming constant {i} is not positive")));
        }
        let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
        Ok(Self {
            order,
            weights: weights.into_iter().map(|w| w / norm).collect(),
        })
    }

    pub fn order(&self) -> &Permutation {
        &self.order
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Weight of eigenvalue `λ_k` (0-based, ascending order).
    pub fn weight_of(&self, k: usize) -> f64 {
        let inv = self.order.inverse();
        self.weights[inv.apply(k)]
    }

    /// The same constants listed in the order of `target`.
    pub fn reindex(&self, target: &Permutation) -> NormingVector {
        let inv = self.order.inverse();
        let weights = target.images().iter().map(|&k| self.weights[inv.apply(k)]).collect();
        NormingVector {
            order: target.clone(),
            weights,
        }
    }
}
