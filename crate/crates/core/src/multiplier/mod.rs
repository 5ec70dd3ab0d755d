//! Schur multipliers `S_A(X) = A ∘ X`.

mod scan;
mod sdp;
mod search;

use alloc::boxed::Box;

pub use scan::{
    evaluate_pattern, gap_scan, reduce_pattern, scan_patterns, NormCache, ScanMode, ScanOptions, ScanRecord,
    ScanReport, EXHAUSTIVE_CELL_LIMIT,
};
pub use sdp::{haagerup_norm, haagerup_norm_with, FactorizationCertificate, NormReport, SdpOptions};
pub use search::{lower_bound_search, lower_bound_search_with, SearchOptions, SearchResult, DEFAULT_SEED};

use crate::linalg::{ComplexMatrix, LinalgError, C64};
use crate::pattern::PatternSet;

/// `2/√3`, the smallest norm an idempotent Schur multiplier can have above 1.
pub const TWO_OVER_ROOT_THREE: f64 = 1.154_700_538_379_251_5;

#[derive(Debug, Clone, thiserror::Error)]
pub enum MultiplierError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("SDP did not converge after {} iterations (bounds {} .. {})", .0.iterations, .0.lower_bound, .0.sdp_value)]
    NoConvergence(Box<NormReport>),
    #[error("{rows}x{cols} grid has {} cells; exhaustive scans are limited to {limit}", rows * cols)]
    BudgetExceeded { rows: usize, cols: usize, limit: usize },
}

/// Entrywise product `A ∘ X`.
pub fn schur_apply(a: &ComplexMatrix, x: &ComplexMatrix) -> Result<ComplexMatrix, MultiplierError> {
    Ok(a.hadamard(x)?)
}

/// Block-diagonal `A ⊕ B`.
pub fn direct_sum(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m1, n1) = a.shape();
    let (m2, n2) = b.shape();
    ComplexMatrix::from_fn(m1 + m2, n1 + n2, |i, j| {
        if i < m1 && j < n1 {
            a[(i, j)]
        } else if i >= m1 && j >= n1 {
            b[(i - m1, j - n1)]
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// Kronecker product `A ⊗ B`.
pub fn kronecker(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (m2, n2) = b.shape();
    ComplexMatrix::from_fn(a.rows() * m2, a.cols() * n2, |i, j| {
        a[(i / m2, j / n2)] * b[(i % m2, j % n2)]
    })
}

/// The pattern `{a_ij ≈ 1}` when every entry is within `tol` of 0 or 1,
/// i.e. when `S_A` is (numerically) idempotent.
pub fn certify_idempotent(a: &ComplexMatrix, tol: f64) -> Option<PatternSet> {
    let mut e = PatternSet::new(a.rows(), a.cols()).ok()?;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let z = a[(i, j)];
            if (z - C64::new(1.0, 0.0)).norm() <= tol {
                e.insert(i, j).ok()?;
            } else if z.norm() > tol {
                return None;
            }
        }
    }
    Some(e)
}
