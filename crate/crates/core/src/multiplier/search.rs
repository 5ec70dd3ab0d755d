//! Lower bounds for `‖S_A‖` from explicit contractions `X` with `‖A ∘ X‖` large.

use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::{gaussian_matrix, hermitian_eig, operator_norm, polar_factor, random_unitary, ComplexMatrix, C64};

/// Knobs for [`lower_bound_search_with`].
#[derive(Clone, Copy, Debug)]
pub struct SearchOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Size of the first random perturbation in the ascent phase.
    pub initial_step: f64,
    /// Factor applied to the step after a rejected perturbation.
    pub step_decay: f64,
    pub min_step: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            restarts: 32,
            initial_step: 0.25,
            step_decay: 0.5,
            min_step: 1e-9,
        }
    }
}

pub const DEFAULT_SEED: u64 = 0x5eed_2b5f_3000_0001;

/// Best value found and the contraction attaining it.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub value: f64,
    pub witness: ComplexMatrix,
}

/// Top singular triple `(σ, ξ, η)` of `m` with `m η = σ ξ`.
fn top_singular_pair(m: &ComplexMatrix) -> (f64, Vec<C64>, Vec<C64>) {
    let gram = (&m.adjoint() * m).hermitian_part();
    let e = hermitian_eig(&gram).expect("Gram matrix is Hermitian");
    let sigma = libm::sqrt(e.values[0].max(0.0));
    let eta = e.vectors.column(0);
    let mut xi: Vec<C64> = (0..m.rows())
        .map(|i| m.row(i).iter().zip(&eta).map(|(a, b)| a * b).sum())
        .collect();
    if sigma > 0.0 {
        xi.iter_mut().for_each(|z| *z /= sigma);
    }
    (sigma, xi, eta)
}

/// The contraction maximizing `Re Σ x_ij conj(ξ_i) a_ij η_j`:
/// `conj(polar(B))` with `B_ij = conj(ξ_i) a_ij η_j`.
pub(crate) fn best_response(a: &ComplexMatrix, xi: &[C64], eta: &[C64]) -> ComplexMatrix {
    let b = ComplexMatrix::from_fn(a.rows(), a.cols(), |i, j| xi[i].conj() * a[(i, j)] * eta[j]);
    polar_factor(&b).conj()
}

/// Alternating ascent on `‖A ∘ X‖` over contractions. Each step takes the top
/// singular pair of `A ∘ X` and replaces `X` by the best response to it, which
/// never decreases the value. Stops after `max_steps` or when the gain drops
/// below `gain_tol`.
pub(crate) fn polar_ascent(a: &ComplexMatrix, start: ComplexMatrix, max_steps: usize, gain_tol: f64) -> SearchResult {
    let mut x = start;
    let mut value = operator_norm(&a.hadamard(&x).expect("same shape"));
    for _ in 0..max_steps {
        let ax = a.hadamard(&x).expect("same shape");
        let (sigma, xi, eta) = top_singular_pair(&ax);
        if sigma == 0.0 {
            break;
        }
        let cand = best_response(a, &xi, &eta);
        let cand_value = operator_norm(&a.hadamard(&cand).expect("same shape"));
        if cand_value <= value {
            break;
        }
        let gain = cand_value - value;
        x = cand;
        value = cand_value;
        if gain <= gain_tol * value.max(1.0) {
            break;
        }
    }
    SearchResult { value, witness: x }
}

/// Lower bound for `‖S_A‖` by searching over unitaries, with the default
/// step schedule and the given seed and restart count.
pub fn lower_bound_search(a: &ComplexMatrix, seed: u64, restarts: usize) -> SearchResult {
    lower_bound_search_with(
        a,
        &SearchOptions {
            seed,
            restarts,
            ..SearchOptions::default()
        },
    )
}

/// Random-restart search for a unitary `U` maximizing `‖A ∘ U‖`.
///
/// Rectangular `A` is zero-padded to a square; the witness is the top-left
/// block of the best unitary, which is a contraction attaining the same
/// value. Each restart draws a Haar unitary, climbs with [`polar_ascent`]
/// and then tries random perturbations (re-unitarized through the polar
/// factor), halving the step on every rejection until it falls below
/// `min_step`. Deterministic for a fixed seed.
pub fn lower_bound_search_with(a: &ComplexMatrix, opts: &SearchOptions) -> SearchResult {
    let (m, n) = a.shape();
    let size = m.max(n);
    if size == 0 {
        return SearchResult {
            value: 0.0,
            witness: ComplexMatrix::zeros(m, n),
        };
    }
    let padded = a.padded(size, size);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = SearchResult {
        value: f64::NEG_INFINITY,
        witness: ComplexMatrix::identity(size),
    };
    for _ in 0..opts.restarts.max(1) {
        let start = random_unitary(size, &mut rng);
        let mut cur = polar_ascent(&padded, start, 200, 1e-13);
        let mut step = opts.initial_step;
        while step >= opts.min_step {
            let noise = gaussian_matrix(size, size, &mut rng).scale(C64::new(step, 0.0));
            let trial = polar_factor(&(&cur.witness + &noise));
            let value = operator_norm(&padded.hadamard(&trial).expect("same shape"));
            if value > cur.value {
                cur = polar_ascent(&padded, trial, 50, 1e-13);
            } else {
                step *= opts.step_decay;
            }
        }
        if cur.value > best.value {
            best = cur;
        }
    }
    let rows: Vec<usize> = (0..m).collect();
    let cols: Vec<usize> = (0..n).collect();
    let witness = best.witness.submatrix(&rows, &cols);
    let value = operator_norm(&a.hadamard(&witness).expect("same shape"));
    SearchResult { value, witness }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangular_two_by_two() {
        let a = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let r = lower_bound_search(&a, DEFAULT_SEED, 8);
        let target = 2.0 / libm::sqrt(3.0);
        assert!(r.value >= target - 1e-9, "{}", r.value);
        assert!(r.value <= target + 1e-12);
        assert!(operator_norm(&r.witness) <= 1.0 + 1e-10);
    }

    #[test]
    fn diagonal_pattern_attains_one() {
        let a = ComplexMatrix::identity(3);
        let r = lower_bound_search(&a, 1, 4);
        assert!((r.value - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rectangular_input_is_padded() {
        let a = ComplexMatrix::from_real(1, 3, &[1.0, 1.0, 1.0]).unwrap();
        let r = lower_bound_search(&a, 2, 2);
        assert_eq!(r.witness.shape(), (1, 3));
        assert!((r.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = ComplexMatrix::from_real(3, 3, &[1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0]).unwrap();
        let r1 = lower_bound_search(&a, 42, 3);
        let r2 = lower_bound_search(&a, 42, 3);
        assert_eq!(r1.value, r2.value);
        assert_eq!(r1.witness, r2.witness);
    }
}
