//! Tolerance scales shared by the kernels.
//!
//! Every threshold is relative to a matrix or spectrum norm and carries a
//! global multiplier so callers (the CLI reads `ISOATLAS_TOL`) can loosen or
//! tighten all of them at once.

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { scale: 1.0 }
    }
}

fn floor(norm: f64) -> f64 {
    if norm > 0.0 {
        norm
    } else {
        f64::MIN_POSITIVE
    }
}

impl Tolerances {
    pub fn scaled(scale: f64) -> Self {
        Self { scale }
    }

    /// Factorization and orthogonality residuals.
    pub fn fact(&self, n: usize, norm: f64) -> f64 {
        1e-12 * n as f64 * floor(norm) * self.scale
    }

    /// Eigenvalue agreement.
    pub fn eig(&self, norm: f64) -> f64 {
        1e-10 * floor(norm) * self.scale
    }

    /// Minimal admissible spectral gap.
    pub fn gap(&self, norm: f64) -> f64 {
        1e-8 * floor(norm) * self.scale
    }

    /// Off-diagonal entries at or below this are treated as zero when splitting blocks.
    pub fn block(&self, norm: f64) -> f64 {
        1e-12 * floor(norm) * self.scale
    }

    /// Pivot threshold for unit-scale (orthogonal) matrices.
    pub fn sing(&self) -> f64 {
        1e-13 * self.scale
    }

    /// Distance below which a shift is considered to sit on the spectrum.
    pub fn shift(&self, norm: f64) -> f64 {
        1e-10 * floor(norm) * self.scale
    }

    /// Deflation threshold for QR trajectories.
    pub fn deflate(&self, norm: f64) -> f64 {
        1e-13 * floor(norm) * self.scale
    }
}
