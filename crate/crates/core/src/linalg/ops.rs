use alloc::vec::Vec;

use rand::Rng;
use rand_distr::StandardNormal;

use super::eig::{check_hermitian, hermitian_eig, EigOptions};
use super::matrix::{ComplexMatrix, C64};
use super::LinalgError;

/// Gram matrix on the smaller side: `M* M` or `M M*`.
fn small_gram(m: &ComplexMatrix) -> ComplexMatrix {
    if m.cols() <= m.rows() {
        (&m.adjoint() * m).hermitian_part()
    } else {
        (m * &m.adjoint()).hermitian_part()
    }
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.rows() == 0 || m.cols() == 0 {
        return 0.0;
    }
    let gram = small_gram(m);
    let e = hermitian_eig(&gram).expect("Gram matrix is Hermitian");
    libm::sqrt(e.values[0].max(0.0))
}

/// Singular values in descending order (`min(rows, cols)` of them).
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Vec::new();
    }
    let e = hermitian_eig(&small_gram(m)).expect("Gram matrix is Hermitian");
    e.values.iter().map(|&l| libm::sqrt(l.max(0.0))).collect()
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Nearest positive semidefinite matrix in Frobenius norm.
pub fn psd_project(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    psd_project_with(m, &EigOptions::default())
}

pub fn psd_project_with(m: &ComplexMatrix, opts: &EigOptions) -> Result<ComplexMatrix, LinalgError> {
    let e = super::eig::hermitian_eig_with(m, opts)?;
    if e.values.last().is_none_or(|&l| l >= 0.0) {
        return Ok(m.hermitian_part());
    }
    Ok(e.reconstruct_with(|l| l.max(0.0)))
}

/// Smallest eigenvalue of a Hermitian matrix.
pub fn min_eigenvalue(m: &ComplexMatrix) -> Result<f64, LinalgError> {
    check_hermitian(m, EigOptions::default().hermitian_tol)?;
    let e = hermitian_eig(m)?;
    Ok(e.values.last().copied().unwrap_or(0.0))
}

/// Modified Gram-Schmidt with one re-orthogonalization pass. Vectors whose
/// residual falls below `drop_tol` are discarded.
pub(crate) fn orthonormalize(vectors: &[Vec<C64>], drop_tol: f64) -> Vec<Vec<C64>> {
    let mut basis: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        let start = libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum());
        for _ in 0..2 {
            for b in &basis {
                let dot: C64 = b.iter().zip(&w).map(|(x, y)| x.conj() * y).sum();
                for (wi, bi) in w.iter_mut().zip(b) {
                    *wi -= dot * bi;
                }
            }
        }
        let norm = libm::sqrt(w.iter().map(|z| z.norm_sqr()).sum());
        if norm > drop_tol * start.max(1.0) && norm > 0.0 {
            w.iter_mut().for_each(|z| *z /= norm);
            basis.push(w);
        }
    }
    basis
}

/// Unitary factor of the polar decomposition: for `M = W |M|` returns `W`,
/// an `m x n` matrix with orthonormal columns (when `m >= n`) or rows.
/// On the null space of `M` the factor is completed arbitrarily, so the
/// result is always a contraction and unitary when `M` is square.
pub fn polar_factor(m: &ComplexMatrix) -> ComplexMatrix {
    if m.rows() < m.cols() {
        return polar_factor(&m.adjoint()).adjoint();
    }
    let (rows, cols) = m.shape();
    if cols == 0 {
        return ComplexMatrix::zeros(rows, 0);
    }
    let e = hermitian_eig(&(&m.adjoint() * m).hermitian_part()).expect("Gram matrix is Hermitian");
    let smax = libm::sqrt(e.values[0].max(0.0));
    let cutoff = 1e-10 * smax.max(f64::MIN_POSITIVE);
    let mut left: Vec<Vec<C64>> = Vec::with_capacity(cols);
    for k in 0..cols {
        let sigma = libm::sqrt(e.values[k].max(0.0));
        if sigma <= cutoff {
            break;
        }
        let vk = e.vectors.column(k);
        let mut u: Vec<C64> = (0..rows)
            .map(|i| m.row(i).iter().zip(&vk).map(|(a, b)| a * b).sum::<C64>())
            .collect();
        u.iter_mut().for_each(|z| *z /= sigma);
        left.push(u);
    }
    let mut left = orthonormalize(&left, 1e-8);
    // Complete with standard basis vectors.
    let mut i = 0;
    while left.len() < cols && i < rows {
        let mut e_i = alloc::vec![C64::new(0.0, 0.0); rows];
        e_i[i] = C64::new(1.0, 0.0);
        let mut all = left.clone();
        all.push(e_i);
        let ortho = orthonormalize(&all, 1e-8);
        if ortho.len() > left.len() {
            left = ortho;
        }
        i += 1;
    }
    // W = U V*
    ComplexMatrix::from_fn(rows, cols, |i, j| {
        (0..cols).map(|k| left[k][i] * e.vectors[(j, k)].conj()).sum()
    })
}

/// Matrix with independent standard complex Gaussian entries.
pub fn gaussian_matrix<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar-distributed unitary from the QR factorization of a Gaussian matrix
/// (Gram-Schmidt on the columns).
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = gaussian_matrix(n, n, rng);
        let cols: Vec<Vec<C64>> = (0..n).map(|j| g.column(j)).collect();
        let q = orthonormalize(&cols, 1e-10);
        if q.len() == n {
            return ComplexMatrix::from_fn(n, n, |i, j| q[j][i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn operator_norm_basic() {
        assert!((operator_norm(&ComplexMatrix::identity(3)) - 1.0).abs() < 1e-15);
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap();
        assert!((operator_norm(&m) - 2.0).abs() < 1e-15);
        let wide = ComplexMatrix::from_real(1, 3, &[3.0, 0.0, 4.0]).unwrap();
        assert!((operator_norm(&wide) - 5.0).abs() < 1e-14);
    }

    #[test]
    fn psd_projection_examples() {
        let neg = ComplexMatrix::identity(3).scale(C64::new(-1.0, 0.0));
        assert!(psd_project(&neg).unwrap().max_abs() < 1e-15);
        let d = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let want = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(psd_project(&d).unwrap().max_abs_diff(&want) < 1e-15);
        let psd = ComplexMatrix::from_real(2, 2, &[2.0, 1.0, 1.0, 2.0]).unwrap();
        assert!(psd_project(&psd).unwrap().max_abs_diff(&psd) < 1e-15);
        assert!(psd_project(&ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn polar_factor_is_unitary_for_singular_input() {
        let m = ComplexMatrix::from_real(3, 3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        let w = polar_factor(&m);
        assert!((&w.adjoint() * &w).max_abs_diff(&ComplexMatrix::identity(3)) < 1e-12);
        // W* M = |M| is PSD
        let p = &w.adjoint() * &m;
        assert!(p.hermitian_defect() < 1e-12);
        assert!(min_eigenvalue(&p.hermitian_part()).unwrap() > -1e-12);
    }

    #[test]
    fn polar_factor_rectangular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = gaussian_matrix(2, 4, &mut rng);
        let w = polar_factor(&m);
        assert_eq!(w.shape(), (2, 4));
        assert!((&w * &w.adjoint()).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-12);
        assert!((operator_norm(&w) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = random_unitary(5, &mut rng);
        assert!((&u.adjoint() * &u).max_abs_diff(&ComplexMatrix::identity(5)) < 1e-13);
    }
}
