//! Cyclic Jacobi eigensolver for dense Hermitian matrices.

use alloc::vec::Vec;

use super::matrix::{ComplexMatrix, C64};
use super::LinalgError;

/// Options for [`hermitian_eig_with`].
#[derive(Clone, Copy, Debug)]
pub struct EigOptions {
    /// Largest accepted `|m_ij - conj(m_ji)|`, relative to `max(1, max|m_ij|)`.
    pub hermitian_tol: f64,
    pub max_sweeps: usize,
}

impl Default for EigOptions {
    fn default() -> Self {
        Self {
            hermitian_tol: 1e-12,
            max_sweeps: 64,
        }
    }
}

/// `M = U diag(values) U*` with eigenvalues sorted in descending order and
/// eigenvectors stored as the columns of `vectors`.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds `U diag(f(values)) U*`.
    pub fn reconstruct_with(&self, mut f: impl FnMut(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        let weights: Vec<f64> = self.values.iter().map(|&l| f(l)).collect();
        let mut out = ComplexMatrix::zeros(n, n);
        for (k, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let ui = u[(i, k)] * w;
                if ui.re == 0.0 && ui.im == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += ui * u[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.reconstruct_with(|l| l)
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen, LinalgError> {
    hermitian_eig_with(m, &EigOptions::default())
}

pub fn hermitian_eig_with(m: &ComplexMatrix, opts: &EigOptions) -> Result<HermitianEigen, LinalgError> {
    check_hermitian(m, opts.hermitian_tol)?;
    let n = m.rows();
    let mut a = m.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    jacobi(&mut a, &mut v, opts.max_sweeps);
    Ok(sorted(a, v))
}

/// Eigendecomposition started from the orthonormal `basis` (typically the
/// eigenvectors of a nearby matrix). Converges in very few sweeps when the
/// basis nearly diagonalizes `m`.
pub(crate) fn hermitian_eig_warm(m: &ComplexMatrix, basis: &ComplexMatrix, max_sweeps: usize) -> HermitianEigen {
    let mut a = (&(&basis.adjoint() * m) * basis).hermitian_part();
    let mut v = basis.clone();
    jacobi(&mut a, &mut v, max_sweeps);
    sorted(a, v)
}

pub(crate) fn check_hermitian(m: &ComplexMatrix, tol: f64) -> Result<(), LinalgError> {
    if !m.is_square() {
        return Err(LinalgError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let defect = m.hermitian_defect();
    if defect > tol * m.max_abs().max(1.0) {
        return Err(LinalgError::NotHermitian { defect });
    }
    Ok(())
}

fn sorted(a: ComplexMatrix, v: ComplexMatrix) -> HermitianEigen {
    let n = a.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].re.total_cmp(&a[(i, i)].re));
    let values = order.iter().map(|&k| a[(k, k)].re).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    HermitianEigen { values, vectors }
}

/// Rotates `a` towards diagonal form in place, accumulating the rotations
/// into the columns of `v`. `a` must be exactly Hermitian on entry.
fn jacobi(a: &mut ComplexMatrix, v: &mut ComplexMatrix, max_sweeps: usize) {
    let n = a.rows();
    if n < 2 {
        return;
    }
    let scale = a.frobenius_norm();
    if scale == 0.0 {
        return;
    }
    let threshold = f64::EPSILON * scale;
    for _ in 0..max_sweeps {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[(p, q)].norm_sqr();
            }
        }
        if libm::sqrt(off) <= threshold {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r <= 1e-18 * scale {
                    continue;
                }
                rotate(a, v, p, q, apq, r);
            }
        }
    }
}

#[inline]
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize, apq: C64, r: f64) {
    let n = a.rows();
    // Phase that makes the pivot real, followed by a real plane rotation.
    let phase = apq / r; // e^{i phi}
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.5 / theta
    } else {
        let s = if theta >= 0.0 { 1.0 } else { -1.0 };
        s / (theta.abs() + libm::sqrt(theta * theta + 1.0))
    };
    let c = 1.0 / libm::sqrt(t * t + 1.0);
    let s = t * c;
    // G = diag(1, conj(phase)) on (p, q) followed by [[c, s], [-s, c]].
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = phase.conj() * (-s);
    let g_qq = phase.conj() * c;

    // A <- A G
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    // A <- G* A
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
    // V <- V G
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}
