//! Bidiagonal coordinates on manifolds of isospectral symmetric tridiagonal
//! matrices, with the QR iterations and Toda flows that become linear in them.

pub mod charts;
pub mod error;
pub mod linalg;
pub mod mesh;
pub mod qr;
pub mod toda;
pub mod tolerance;

pub use error::{AtlasError, Result};
pub use tolerance::Tolerances;
