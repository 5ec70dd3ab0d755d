//! Normalizers of the diagonal masa and how Schur multipliers act on them.
//!
//! A square matrix `T` normalizes the diagonal matrices (`T* D T` and
//! `T D T*` diagonal for every diagonal `D`) exactly when each row and each
//! column holds at most one non-zero entry. Such `T` factor as `T = V |T|`
//! with `|T|` diagonal and `V` a partial permutation with unimodular entries,
//! and a Schur multiplier acts on them by a diagonal: `A ∘ T = D T` with
//! `D = (A ∘ V) V*` depending on `V` only.

use alloc::vec::Vec;

use crate::linalg::{ComplexMatrix, LinalgError, C64};
use crate::pattern::PatternSet;

pub const DEFAULT_NORMALIZER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NormalizerError {
    #[error("row {0} has more than one non-zero entry")]
    RowConflict(usize),
    #[error("column {0} has more than one non-zero entry")]
    ColumnConflict(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// First row or column with two entries of modulus above `tol`.
fn conflict(m: &ComplexMatrix, tol: f64) -> Option<NormalizerError> {
    let n = m.rows();
    for i in 0..n {
        if (0..n).filter(|&j| m[(i, j)].norm() > tol).count() > 1 {
            return Some(NormalizerError::RowConflict(i));
        }
    }
    for j in 0..n {
        if (0..n).filter(|&i| m[(i, j)].norm() > tol).count() > 1 {
            return Some(NormalizerError::ColumnConflict(j));
        }
    }
    None
}

pub fn is_normalizer(m: &ComplexMatrix, tol: f64) -> bool {
    m.is_square() && conflict(m, tol).is_none()
}

/// A validated normalizer with its polar decomposition `T = V |T|`.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizerMatrix {
    matrix: ComplexMatrix,
    pattern: PatternSet,
    polar_isometry: ComplexMatrix,
    modulus: Vec<f64>,
}

impl NormalizerMatrix {
    pub fn new(matrix: ComplexMatrix, tol: f64) -> Result<Self, NormalizerError> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(LinalgError::NotSquare { rows, cols }.into());
        }
        if let Some(err) = conflict(&matrix, tol) {
            return Err(err);
        }
        let n = rows;
        let mut pattern = PatternSet::new(n.max(1), n.max(1)).expect("non-empty grid");
        let mut polar_isometry = ComplexMatrix::zeros(n, n);
        let mut modulus = alloc::vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                let z = matrix[(i, j)];
                let r = z.norm();
                if r > tol {
                    pattern.insert(i, j).expect("in range");
                    polar_isometry[(i, j)] = z / r;
                    modulus[j] = r;
                }
            }
        }
        Ok(Self {
            matrix,
            pattern,
            polar_isometry,
            modulus,
        })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Cells holding the non-zero entries.
    pub fn pattern(&self) -> &PatternSet {
        &self.pattern
    }

    /// `V`: entries of modulus 0 or 1 on the pattern.
    pub fn polar_isometry(&self) -> &ComplexMatrix {
        &self.polar_isometry
    }

    /// Diagonal of `|T| = (T* T)^{1/2}`.
    pub fn modulus(&self) -> &[f64] {
        &self.modulus
    }

    pub fn modulus_matrix(&self) -> ComplexMatrix {
        let d: Vec<C64> = self.modulus.iter().map(|&r| C64::new(r, 0.0)).collect();
        ComplexMatrix::from_diagonal(&d)
    }
}

/// The diagonal `D = (A ∘ V) V*` with `A ∘ T = D T`.
pub fn diagonal_part(a: &ComplexMatrix, t: &NormalizerMatrix) -> Result<ComplexMatrix, NormalizerError> {
    let v = t.polar_isometry();
    let av = a.hadamard(v)?;
    Ok(av.checked_mul(&v.adjoint())?)
}

/// The 0/1 matrix of `C_h`, with a one at `(i, h(i))` for every row `i`.
/// Indices of `h` must be below `h.len()`.
pub fn composition_operator(h: &[usize]) -> Result<ComplexMatrix, NormalizerError> {
    let n = h.len();
    let mut c = ComplexMatrix::zeros(n, n);
    for (i, &hi) in h.iter().enumerate() {
        if hi >= n {
            return Err(LinalgError::DimensionMismatch {
                expected: (n, n),
                found: (i, hi),
            }
            .into());
        }
        c[(i, hi)] = C64::new(1.0, 0.0);
    }
    Ok(c)
}

/// `k(i) = a_{i, h(i)}`, so that `A ∘ C_h = diag(k) C_h`. `h` need not be
/// injective.
pub fn composition_symbol(a: &ComplexMatrix, h: &[usize]) -> Result<Vec<C64>, NormalizerError> {
    let n = a.rows();
    if !a.is_square() || h.len() != n {
        return Err(LinalgError::DimensionMismatch {
            expected: (n, n),
            found: (h.len(), a.cols()),
        }
        .into());
    }
    h.iter()
        .enumerate()
        .map(|(i, &hi)| {
            if hi >= n {
                Err(LinalgError::DimensionMismatch {
                    expected: (n, n),
                    found: (i, hi),
                }
                .into())
            } else {
                Ok(a[(i, hi)])
            }
        })
        .collect()
}

/// Toeplitz matrix whose `k`-th diagonal is the mean of the `k`-th diagonal
/// of `m`.
pub fn toeplitz_average(m: &ComplexMatrix) -> Result<ComplexMatrix, NormalizerError> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(LinalgError::NotSquare { rows, cols }.into());
    }
    let n = rows;
    if n == 0 {
        return Ok(m.clone());
    }
    let offset = |i: usize, j: usize| j + n - 1 - i;
    let mut sums = alloc::vec![C64::new(0.0, 0.0); 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            sums[offset(i, j)] += m[(i, j)];
        }
    }
    for (d, s) in sums.iter_mut().enumerate() {
        let k = d.abs_diff(n - 1);
        *s /= (n - k) as f64;
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| sums[offset(i, j)]))
}

/// Whether every diagonal of `m` is constant within `tol`.
pub fn is_toeplitz(m: &ComplexMatrix, tol: f64) -> bool {
    let (rows, cols) = m.shape();
    (1..rows).all(|i| (1..cols).all(|j| (m[(i, j)] - m[(i - 1, j - 1)]).norm() <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(n: usize, v: &[f64]) -> ComplexMatrix {
        ComplexMatrix::from_real(n, n, v).unwrap()
    }

    #[test]
    fn normalizer_detection() {
        let perm = real(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        assert!(is_normalizer(&perm, DEFAULT_NORMALIZER_TOL));
        assert!(!is_normalizer(&real(2, &[1.0, 1.0, 0.0, 1.0]), DEFAULT_NORMALIZER_TOL));
        assert_eq!(
            NormalizerMatrix::new(real(2, &[1.0, 1.0, 0.0, 1.0]), 1e-10).unwrap_err(),
            NormalizerError::RowConflict(0)
        );
        assert_eq!(
            NormalizerMatrix::new(real(2, &[1.0, 0.0, 1.0, 0.0]), 1e-10).unwrap_err(),
            NormalizerError::ColumnConflict(0)
        );
    }

    #[test]
    fn polar_decomposition() {
        let t = ComplexMatrix::from_rows(&[
            [C64::new(0.0, 0.0), C64::new(0.0, -2.0)],
            [C64::new(3.0, 0.0), C64::new(0.0, 0.0)],
        ])
        .unwrap();
        let nm = NormalizerMatrix::new(t.clone(), 1e-10).unwrap();
        assert_eq!(nm.modulus(), [3.0, 2.0]);
        let rebuilt = nm.polar_isometry() * &nm.modulus_matrix();
        assert!(rebuilt.max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn diagonal_part_of_identity() {
        let a = real(3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let t = NormalizerMatrix::new(ComplexMatrix::identity(3), 1e-10).unwrap();
        assert_eq!(
            diagonal_part(&a, &t).unwrap(),
            real(3, &[1.0, 0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 9.0])
        );
    }

    #[test]
    fn diagonal_part_of_cycle() {
        let a = real(3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let v = real(3, &[0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0.0]);
        let d = diagonal_part(&a, &NormalizerMatrix::new(v.clone(), 1e-10).unwrap()).unwrap();
        assert_eq!(d, real(3, &[2.0, 0.0, 0.0, 0.0, 6.0, 0.0, 0.0, 0.0, 7.0]));
        assert_eq!(a.hadamard(&v).unwrap(), &d * &v);
        let scaled = &v * &real(3, &[5.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let d2 = diagonal_part(&a, &NormalizerMatrix::new(scaled, 1e-10).unwrap()).unwrap();
        assert_eq!(d, d2);
    }

    #[test]
    fn composition_symbol_examples() {
        let a = real(3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0]);
        let id = composition_symbol(&a, &[0, 1, 2]).unwrap();
        assert_eq!(id, [1.0, 5.0, 9.0].map(|x| C64::new(x, 0.0)));
        let constant = composition_symbol(&a, &[2, 2, 2]).unwrap();
        assert_eq!(constant, [3.0, 6.0, 9.0].map(|x| C64::new(x, 0.0)));
        let c = composition_operator(&[2, 2, 2]).unwrap();
        assert_eq!(a.hadamard(&c).unwrap(), &ComplexMatrix::from_diagonal(&constant) * &c);
        assert!(composition_symbol(&a, &[0, 3, 1]).is_err());
        assert!(composition_symbol(&a, &[0, 1]).is_err());
    }

    #[test]
    fn toeplitz_examples() {
        let t = real(3, &[1.0, 2.0, 3.0, 4.0, 1.0, 2.0, 5.0, 4.0, 1.0]);
        assert_eq!(toeplitz_average(&t).unwrap(), t);
        let e00 = real(2, &[1.0, 0.0, 0.0, 0.0]);
        assert_eq!(toeplitz_average(&e00).unwrap(), real(2, &[0.5, 0.0, 0.0, 0.5]));
        assert!(toeplitz_average(&ComplexMatrix::zeros(2, 3)).is_err());
        let one = real(1, &[7.0]);
        assert_eq!(toeplitz_average(&one).unwrap(), one);
    }
}
