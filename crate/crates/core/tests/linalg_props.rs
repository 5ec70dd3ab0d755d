use bimod_core::linalg::{
    gaussian_matrix, hermitian_eig, min_eigenvalue, operator_norm, polar_factor, psd_project, random_unitary,
    singular_values, trace_norm, ComplexMatrix, LinalgError, C64,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn random(m: usize, n: usize, seed: u64) -> ComplexMatrix {
    gaussian_matrix(m, n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn hermitian(n: usize, seed: u64) -> ComplexMatrix {
    random(n, n, seed).hermitian_part()
}

fn unit_vector(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    let v = gaussian_matrix(n, 1, rng).into_vec();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

#[test]
fn random_vectors_never_exceed_operator_norm() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let a = gaussian_matrix(5, 4, &mut rng);
    let bound = operator_norm(&a);
    let mut best = 0.0f64;
    for _ in 0..10_000 {
        let x = unit_vector(&mut rng, 4);
        let ax: f64 = (0..5)
            .map(|i| (0..4).map(|j| a[(i, j)] * x[j]).sum::<C64>().norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(ax <= bound * (1.0 + 1e-12));
        best = best.max(ax);
    }
    assert!(best > 0.5 * bound);
}

#[test]
fn known_values() {
    let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
    let golden = (1.0 + 5f64.sqrt()) / 2.0;
    assert!((operator_norm(&a) - golden).abs() < 1e-12);
    assert!((trace_norm(&a) - 5f64.sqrt()).abs() < 1e-12);
    assert!((operator_norm(&ComplexMatrix::ones(3, 4)) - 12f64.sqrt()).abs() < 1e-12);
    assert_eq!(operator_norm(&ComplexMatrix::zeros(2, 3)), 0.0);
}

#[test]
fn listed_examples() {
    assert!((operator_norm(&ComplexMatrix::from_real(2, 2, &[0.0, 2.0, 0.0, 0.0]).unwrap()) - 2.0).abs() < 1e-12);
    let e = hermitian_eig(&ComplexMatrix::from_real(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]).unwrap())
        .unwrap();
    assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
    let swap = hermitian_eig(&ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap()).unwrap();
    assert!((swap.values[0] - 1.0).abs() < 1e-15 && (swap.values[1] + 1.0).abs() < 1e-15);
    let clipped = psd_project(&ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap()).unwrap();
    assert!(clipped.max_abs_diff(&ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]).unwrap()) < 1e-15);
    assert!(
        psd_project(&ComplexMatrix::identity(3).scale(C64::new(-1.0, 0.0)))
            .unwrap()
            .max_abs()
            < 1e-15
    );
}

#[test]
fn rotation_family_supremum() {
    let f = |theta: f64| {
        let (s, c) = theta.sin_cos();
        operator_norm(&ComplexMatrix::from_real(2, 2, &[c, s, 0.0, c]).unwrap())
    };
    // Golden-section search on [0, pi/2], where the family peaks once.
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    for _ in 0..100 {
        let (a, b) = (hi - phi * (hi - lo), lo + phi * (hi - lo));
        if f(a) < f(b) {
            lo = a;
        } else {
            hi = b;
        }
    }
    assert!((f(0.5 * (lo + hi)) - 2.0 / 3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn non_hermitian_input_is_rejected() {
    let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
    assert!(matches!(hermitian_eig(&a), Err(LinalgError::NotHermitian { .. })));
    assert!(matches!(
        psd_project(&ComplexMatrix::zeros(2, 3)),
        Err(LinalgError::NotSquare { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_reconstructs(n in 1usize..=12, seed in any::<u64>()) {
        let h = hermitian(n, seed);
        let e = hermitian_eig(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h) < 1e-9);
        prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        let gram = &e.vectors.adjoint() * &e.vectors;
        prop_assert!(gram.max_abs_diff(&ComplexMatrix::identity(n)) < 1e-9);
    }

    #[test]
    fn operator_norm_is_unitarily_invariant(m in 1usize..=7, n in 1usize..=7, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = gaussian_matrix(m, n, &mut rng);
        let u = random_unitary(m, &mut rng);
        let v = random_unitary(n, &mut rng);
        let b = &(&u * &a) * &v;
        let scale = operator_norm(&a).max(1.0);
        prop_assert!((operator_norm(&b) - operator_norm(&a)).abs() < 1e-10 * scale);
        prop_assert!((trace_norm(&b) - trace_norm(&a)).abs() < 1e-9 * scale);
    }

    #[test]
    fn singular_values_match_frobenius(m in 1usize..=7, n in 1usize..=7, seed in any::<u64>()) {
        let a = random(m, n, seed);
        let s = singular_values(&a);
        prop_assert_eq!(s.len(), m.min(n));
        let f2: f64 = s.iter().map(|x| x * x).sum();
        prop_assert!((f2.sqrt() - a.frobenius_norm()).abs() < 1e-9 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn psd_projection_is_idempotent(n in 1usize..=10, seed in any::<u64>()) {
        let h = hermitian(n, seed);
        let p = psd_project(&h).unwrap();
        prop_assert!(min_eigenvalue(&p).unwrap() >= -1e-10);
        prop_assert!(psd_project(&p).unwrap().max_abs_diff(&p) < 1e-10);
        // Nearest point: the residual is negative semidefinite.
        let r = &h - &p;
        prop_assert!(hermitian_eig(&r).unwrap().values[0] <= 1e-10);
    }

    #[test]
    fn polar_factor_is_a_partial_isometry_attaining_the_trace_norm(
        m in 1usize..=6, n in 1usize..=6, seed in any::<u64>(),
    ) {
        let a = random(m, n, seed);
        let u = polar_factor(&a);
        prop_assert!((operator_norm(&u) - 1.0).abs() < 1e-10);
        // tr(U* A) = ‖A‖_tr.
        let t: C64 = (0..m).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| u[(i, j)].conj() * a[(i, j)]).sum();
        prop_assert!((t.re - trace_norm(&a)).abs() < 1e-9 * trace_norm(&a).max(1.0));
        prop_assert!(t.im.abs() < 1e-9 * trace_norm(&a).max(1.0));
    }
}
