//! Dense small-matrix kernels and the tridiagonal eigensolver.

mod eigen;
mod factor;
mod matrix;
mod perm;
mod tridiag;

pub use eigen::{bisect_eigenvalue, sturm_count, sym_tridiag_eigen, sym_tridiag_eigen_with, TridiagEigen};
pub use factor::{
    is_lu_positive, lu_unit, lu_unit_with, plu_select, qr_positive, qr_positive_with, sign_fix_lu_positive,
};
pub(crate) use factor::{doolittle, householder_qr, plu_select_restricted, signs_of_pivots};
pub use matrix::DenseMatrix;
pub use perm::{Permutation, SignDiagonal};
pub use tridiag::SymTridiagonal;
