use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{DenseMatrix, SymTridiagonal};
use crate::error::{AtlasError, Result};

/// A permutation of `{0, .., n-1}`, stored as its images.
///
/// The associated matrix `P` has `P e_i = e_{π(i)}`, so
/// `P⁻¹ Λ P = diag(λ_{π(0)}, .., λ_{π(n-1)})`. Text form is one-based:
/// `"3,1,2"` maps 1 ↦ 3, 2 ↦ 1, 3 ↦ 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &p in &images {
            if p >= n || seen[p] {
                return Err(AtlasError::InvalidPermutation(format!("{images:?} is not a bijection")));
            }
            seen[p] = true;
        }
        Ok(Self { images })
    }

    /// Builds from one-based images.
    pub fn from_one_based(images: &[usize]) -> Result<Self> {
        if images.contains(&0) {
            return Err(AtlasError::InvalidPermutation("one-based images must be positive".into()));
        }
        Self::new(images.iter().map(|&p| p - 1).collect())
    }

    pub fn identity(n: usize) -> Self {
        Self {
            images: (0..n).collect(),
        }
    }

    /// `k ↦ n - 1 - k`.
    pub fn reversal(n: usize) -> Self {
        Self {
            images: (0..n).rev().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.images[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn one_based(&self) -> Vec<usize> {
        self.images.iter().map(|p| p + 1).collect()
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.n()];
        for (i, &p) in self.images.iter().enumerate() {
            inv[p] = i;
        }
        Self { images: inv }
    }

    /// `self ∘ other`, so that `P_{self ∘ other} = P_self P_other`.
    pub fn compose(&self, other: &Permutation) -> Self {
        assert_eq!(self.n(), other.n());
        Self {
            images: other.images.iter().map(|&i| self.images[i]).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.n());
        for (j, &i) in self.images.iter().enumerate() {
            m[(i, j)] = 1.0;
        }
        m
    }

    /// `(v_{π(0)}, .., v_{π(n-1)})`.
    pub fn rearrange<T: Copy>(&self, values: &[T]) -> Vec<T> {
        self.images.iter().map(|&p| values[p]).collect()
    }

    /// All permutations of `n` elements in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation {
                images: current.clone(),
            });
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: Vec<String> = self.one_based().iter().map(|p| p.to_string()).collect();
        write!(f, "({})", s.join(","))
    }
}

impl FromStr for Permutation {
    type Err = AtlasError;

    fn from_str(s: &str) -> Result<Self> {
        let images = s
            .trim()
            .trim_start_matches('(')
            .trim_end_matches(')')
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<usize>()
                    .map_err(|e| AtlasError::InvalidPermutation(format!("{t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_one_based(&images)
    }
}

impl TryFrom<Vec<usize>> for Permutation {
    type Error = AtlasError;

    fn try_from(images: Vec<usize>) -> Result<Self> {
        Self::from_one_based(&images)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Vec<usize> {
        p.one_based()
    }
}

/// A diagonal matrix with ±1 entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignDiagonal {
    signs: Vec<i8>,
}

impl SignDiagonal {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(AtlasError::InvalidInput(format!("sign diagonal entries must be ±1, got {signs:?}")));
        }
        Ok(Self { signs })
    }

    pub fn identity(n: usize) -> Self {
        Self { signs: vec![1; n] }
    }

    pub fn n(&self) -> usize {
        self.signs.len()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn sign(&self, i: usize) -> f64 {
        f64::from(self.signs[i])
    }

    /// `E M`: flips the rows with a negative sign.
    pub fn apply_rows(&self, m: &DenseMatrix) -> DenseMatrix {
        let mut out = m.clone();
        for (i, &s) in self.signs.iter().enumerate() {
            if s < 0 {
                out.scale_row(i, -1.0);
            }
        }
        out
    }

    /// `E T E`: the diagonal is unchanged and `b_i ↦ σ_i σ_{i+1} b_i`.
    pub fn conjugate(&self, t: &SymTridiagonal) -> SymTridiagonal {
        assert_eq!(self.n(), t.n());
        let mut out = t.clone();
        for (i, b) in out.off_mut().iter_mut().enumerate() {
            *b *= f64::from(self.signs[i] * self.signs[i + 1]);
        }
        out
    }
}
