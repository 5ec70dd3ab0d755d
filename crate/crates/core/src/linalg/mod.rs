//! Dense complex linear algebra: matrices, Hermitian eigendecomposition,
//! singular values, polar factors and the PSD projection.

mod eig;
mod matrix;
mod ops;

pub(crate) use eig::hermitian_eig_warm;
pub use eig::{hermitian_eig, hermitian_eig_with, EigOptions, HermitianEigen};
pub use matrix::{ComplexMatrix, C64};
pub use ops::{
    gaussian_matrix, min_eigenvalue, operator_norm, polar_factor, psd_project, psd_project_with, random_unitary,
    singular_values, trace_norm,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LinalgError {
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("{rows}x{cols} matrix needs {} entries, got {len}", rows * cols)]
    StorageMismatch { rows: usize, cols: usize, len: usize },
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },
}
