use thiserror::Error;

/// Errors raised by the atlas, the factorization kernels and the dynamics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum AtlasError {
    #[error("matrix is numerically singular (pivot {pivot:e} at column {index})")]
    SingularMatrix { index: usize, pivot: f64 },

    #[error("LU breakdown: leading minor {index} is numerically singular (pivot {pivot:e})")]
    PivotBreakdown { index: usize, pivot: f64 },

    #[error("spectrum is not simple: minimal gap {gap:e} is below {tol:e}")]
    DegenerateSpectrum { gap: f64, tol: f64 },

    #[error("matrix spectrum does not match the prescribed one (max deviation {deviation:e})")]
    SpectrumMismatch { deviation: f64 },

    #[error("matrix is not in the chart domain of permutation {pi}")]
    NotInChart { pi: String },

    #[error("matrix is not Jacobi: off-diagonal entry {index} is {value:e}")]
    NotJacobi { index: usize, value: f64 },

    #[error("overflow guard tripped: {0}")]
    Overflow(String),

    #[error("shift function vanishes on the spectrum at eigenvalue {lambda}")]
    ShiftOnSpectrum { lambda: f64 },

    #[error("shift {shift} is outside the domain of the extended QR step (collides with eigenvalue {lambda})")]
    OutsideDomain { shift: f64, lambda: f64 },

    #[error("asymptotic velocities are not pairwise distinct")]
    DegenerateVelocities,

    #[error("trajectory tail is not free: max force {force:e} exceeds {tol:e}")]
    TailNotFree { force: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, AtlasError>;
