//! Exact Schur multiplier norm through the Haagerup factorization SDP
//!
//! ```text
//! minimize t  subject to  Z = [[P, A], [A*, Q]] ⪰ 0,  diag(P) ≤ t,  diag(Q) ≤ t
//! ```
//!
//! solved by ADMM (Douglas-Rachford splitting) between the PSD cone and the
//! set `C = {Z Hermitian : off-diagonal block = A, diag(Z) ≤ t}` with `t` as a
//! free variable. Every few iterations the current PSD iterate is repaired
//! into an exactly feasible point (off-diagonal block reset to `A`, then the
//! diagonal lifted by the most negative eigenvalue), which gives a rigorous
//! upper bound together with a factorization certificate. The scaled dual
//! iterate supplies row/column weights `p, q`; the polar factor of
//! `D_p^{1/2} A D_q^{1/2}` is a contraction whose Schur image gives a lower
//! bound. The solver stops when the two bounds meet.

use alloc::boxed::Box;
use alloc::vec::Vec;

use super::search::{lower_bound_search_with, polar_ascent, SearchOptions};
use super::MultiplierError;
use crate::linalg::{
    hermitian_eig, hermitian_eig_warm, operator_norm, polar_factor, ComplexMatrix, HermitianEigen, C64,
};

#[derive(Clone, Debug)]
pub struct SdpOptions {
    /// Relative gap `(upper - lower) / max(1, upper)` at which the solve stops.
    pub tol: f64,
    pub max_iterations: usize,
    /// Iterations between bound evaluations.
    pub check_every: usize,
    /// ADMM penalty, held fixed during the solve.
    pub rho: f64,
    /// Eigenvalues below this are dropped from the certificate factor.
    pub factor_cutoff: f64,
    /// Optional random-restart unitary search run after the SDP; its witness
    /// replaces the dual one when it is better.
    pub search: Option<SearchOptions>,
}

impl Default for SdpOptions {
    fn default() -> Self {
        Self {
            tol: 1e-7,
            max_iterations: 50_000,
            check_every: 10,
            rho: 1.0,
            factor_cutoff: 1e-12,
            search: None,
        }
    }
}

/// Vectors with `a_ij = ⟨x_i, y_j⟩ = Σ_k x_ik conj(y_jk)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationCertificate {
    pub row_vectors: Vec<Vec<C64>>,
    pub col_vectors: Vec<Vec<C64>>,
    /// `max_i ‖x_i‖ · max_j ‖y_j‖`.
    pub value: f64,
    /// `max_ij |a_ij - ⟨x_i, y_j⟩|`.
    pub residual: f64,
}

impl FactorizationCertificate {
    pub fn new(a: &ComplexMatrix, row_vectors: Vec<Vec<C64>>, col_vectors: Vec<Vec<C64>>) -> Self {
        let mut cert = Self {
            row_vectors,
            col_vectors,
            value: 0.0,
            residual: 0.0,
        };
        cert.value = cert.recompute_value();
        cert.residual = cert.recompute_residual(a);
        cert
    }

    pub fn rank(&self) -> usize {
        self.row_vectors
            .first()
            .or(self.col_vectors.first())
            .map_or(0, Vec::len)
    }

    pub fn inner(x: &[C64], y: &[C64]) -> C64 {
        x.iter().zip(y).map(|(a, b)| a * b.conj()).sum()
    }

    fn sup_norm(vectors: &[Vec<C64>]) -> f64 {
        vectors
            .iter()
            .map(|v| libm::sqrt(v.iter().map(|z| z.norm_sqr()).sum()))
            .fold(0.0, f64::max)
    }

    pub fn recompute_value(&self) -> f64 {
        Self::sup_norm(&self.row_vectors) * Self::sup_norm(&self.col_vectors)
    }

    pub fn recompute_residual(&self, a: &ComplexMatrix) -> f64 {
        let mut worst = 0.0f64;
        for (i, x) in self.row_vectors.iter().enumerate() {
            for (j, y) in self.col_vectors.iter().enumerate() {
                worst = worst.max((a[(i, j)] - Self::inner(x, y)).norm());
            }
        }
        worst
    }

    fn scaled(mut self, c: f64) -> Self {
        let s = libm::sqrt(c);
        for v in self.row_vectors.iter_mut().chain(self.col_vectors.iter_mut()) {
            v.iter_mut().for_each(|z| *z *= s);
        }
        self.value *= c;
        self.residual *= c;
        self
    }
}

/// Outcome of [`haagerup_norm`].
#[derive(Clone, Debug)]
pub struct NormReport {
    /// Upper bound on `‖S_A‖`, equal to `certificate.value`.
    pub sdp_value: f64,
    /// `‖A ∘ witness‖`.
    pub lower_bound: f64,
    pub certificate: FactorizationCertificate,
    pub witness: ComplexMatrix,
    pub iterations: usize,
    pub converged: bool,
}

impl NormReport {
    pub fn gap(&self) -> f64 {
        self.sdp_value - self.lower_bound
    }
}

/// `‖S_A‖` with default options and the given gap tolerance.
pub fn haagerup_norm(a: &ComplexMatrix, tol: f64) -> Result<NormReport, MultiplierError> {
    haagerup_norm_with(
        a,
        &SdpOptions {
            tol,
            ..SdpOptions::default()
        },
    )
}

pub fn haagerup_norm_with(a: &ComplexMatrix, opts: &SdpOptions) -> Result<NormReport, MultiplierError> {
    let (m, n) = a.shape();
    let scale = a.max_abs();
    if m == 0 || n == 0 || scale == 0.0 {
        return Ok(zero_report(a));
    }
    let unit = a.scale(C64::new(1.0 / scale, 0.0));
    let mut solver = Admm::new(&unit, opts.rho);
    let mut best_upper: Option<(f64, ComplexMatrix)> = None;
    let mut best_lower: Option<(f64, ComplexMatrix)> = None;
    let mut converged = false;
    let mut iterations = 0;
    let check_every = opts.check_every.max(1);

    while iterations < opts.max_iterations {
        let burst = check_every.min(opts.max_iterations - iterations);
        for _ in 0..burst {
            solver.step();
        }
        iterations += burst;

        let (upper, feasible) = solver.repaired_upper_bound();
        if best_upper.as_ref().is_none_or(|(u, _)| upper < *u) {
            best_upper = Some((upper, feasible));
        }
        let (lower, witness) = solver.dual_lower_bound();
        if best_lower.as_ref().is_none_or(|(l, _)| lower > *l) {
            best_lower = Some((lower, witness));
        }
        let u = best_upper.as_ref().map_or(f64::INFINITY, |b| b.0);
        let l = best_lower.as_ref().map_or(0.0, |b| b.0);
        if u - l <= opts.tol * u.max(1.0) {
            converged = true;
            break;
        }
    }

    let (_, feasible) = best_upper.expect("at least one check ran");
    let (_, mut witness) = best_lower.expect("at least one check ran");
    let certificate = certificate_from_block(&unit, &feasible, opts.factor_cutoff).scaled(scale);
    if let Some(search) = &opts.search {
        let found = lower_bound_search_with(a, search);
        if found.value > operator_norm(&a.hadamard(&witness).expect("same shape")) {
            witness = found.witness;
        }
    }
    let lower_bound = operator_norm(&a.hadamard(&witness).expect("same shape"));
    let report = NormReport {
        sdp_value: certificate.value,
        lower_bound,
        certificate,
        witness,
        iterations,
        converged,
    };
    if converged {
        Ok(report)
    } else {
        Err(MultiplierError::NoConvergence(Box::new(report)))
    }
}

fn zero_report(a: &ComplexMatrix) -> NormReport {
    let (m, n) = a.shape();
    let zero = alloc::vec![C64::new(0.0, 0.0)];
    let certificate = FactorizationCertificate::new(a, alloc::vec![zero.clone(); m], alloc::vec![zero; n]);
    NormReport {
        sdp_value: certificate.value,
        lower_bound: 0.0,
        certificate,
        witness: ComplexMatrix::zeros(m, n),
        iterations: 0,
        converged: true,
    }
}

/// Factor `Z = W W*` of a PSD block matrix with off-diagonal block `a`, split
/// into row vectors (first `m` rows of `W`) and column vectors (last `n`),
/// then balanced so both families have the same largest norm.
fn certificate_from_block(a: &ComplexMatrix, z: &ComplexMatrix, cutoff: f64) -> FactorizationCertificate {
    let (m, n) = a.shape();
    let e = hermitian_eig(z).expect("repaired block is Hermitian");
    let kept: Vec<usize> = (0..m + n).filter(|&k| e.values[k] > cutoff).collect();
    let factor_row = |r: usize| -> Vec<C64> {
        if kept.is_empty() {
            return alloc::vec![C64::new(0.0, 0.0)];
        }
        kept.iter()
            .map(|&k| e.vectors[(r, k)] * libm::sqrt(e.values[k]))
            .collect()
    };
    let mut xs: Vec<Vec<C64>> = (0..m).map(factor_row).collect();
    let mut ys: Vec<Vec<C64>> = (m..m + n).map(factor_row).collect();
    let nx = FactorizationCertificate::sup_norm(&xs);
    let ny = FactorizationCertificate::sup_norm(&ys);
    if nx > 0.0 && ny > 0.0 {
        let s = libm::sqrt(ny / nx);
        xs.iter_mut().flatten().for_each(|z| *z *= s);
        ys.iter_mut().flatten().for_each(|z| *z /= s);
    }
    FactorizationCertificate::new(a, xs, ys)
}

struct Admm<'a> {
    a: &'a ComplexMatrix,
    z: ComplexMatrix,
    u: ComplexMatrix,
    rho: f64,
    basis: ComplexMatrix,
    repair_basis: ComplexMatrix,
}

impl<'a> Admm<'a> {
    fn new(a: &'a ComplexMatrix, rho: f64) -> Self {
        let (m, n) = a.shape();
        let s = operator_norm(a);
        let mut z = ComplexMatrix::zeros(m + n, m + n);
        for k in 0..m + n {
            z[(k, k)] = C64::new(s, 0.0);
        }
        write_off_block(&mut z, a);
        Self {
            a,
            z,
            u: ComplexMatrix::zeros(m + n, m + n),
            rho,
            basis: ComplexMatrix::identity(m + n),
            repair_basis: ComplexMatrix::identity(m + n),
        }
    }

    fn step(&mut self) {
        let mut y = &self.z - &self.u;
        self.project_onto_constraints(&mut y);
        let target = &y + &self.u;
        let e = hermitian_eig_warm(&target, &self.basis, 64);
        let z_new = e.reconstruct_with(|l| l.max(0.0));
        self.basis = e.vectors;

        for ((uk, &yk), &zn) in self.u.as_mut_slice().iter_mut().zip(y.as_slice()).zip(z_new.as_slice()) {
            *uk += yk - zn;
        }
        self.z = z_new;
    }

    /// Projection onto `C` with the penalty `t + rho/2 ‖Y - V‖²`: the
    /// off-diagonal block is reset to `A`, other off-diagonal entries are
    /// free, and the diagonal is clipped at the `t` solving
    /// `Σ_k max(v_kk - t, 0) = 1 / rho`.
    fn project_onto_constraints(&self, y: &mut ComplexMatrix) {
        let size = y.rows();
        write_off_block(y, self.a);
        let mut diag: Vec<f64> = (0..size).map(|k| y[(k, k)].re).collect();
        let t = water_level(&mut diag, 1.0 / self.rho);
        for k in 0..size {
            let v = y[(k, k)].re.min(t);
            y[(k, k)] = C64::new(v, 0.0);
        }
    }

    /// Exactly feasible block matrix near the current iterate and its value
    /// `sqrt(max diag P · max diag Q)`.
    fn repaired_upper_bound(&mut self) -> (f64, ComplexMatrix) {
        let (m, n) = self.a.shape();
        let mut z = self.z.clone();
        write_off_block(&mut z, self.a);
        let e: HermitianEigen = hermitian_eig_warm(&z, &self.repair_basis, 64);
        let lift = (-e.values[m + n - 1]).max(0.0);
        self.repair_basis = e.vectors;
        // Small relative margin so the factorization stays PSD after rounding.
        let lift = if lift > 0.0 { lift * (1.0 + 1e-12) + 1e-15 } else { 0.0 };
        for k in 0..m + n {
            z[(k, k)] = C64::new(z[(k, k)].re + lift, 0.0);
        }
        let p = (0..m).map(|k| z[(k, k)].re).fold(0.0, f64::max);
        let q = (m..m + n).map(|k| z[(k, k)].re).fold(0.0, f64::max);
        (libm::sqrt(p * q), z)
    }

    /// Weights from the dual iterate `-rho U`, turned into a contraction by
    /// the polar factor of `D_p^{1/2} A D_q^{1/2}` and polished by ascent.
    fn dual_lower_bound(&self) -> (f64, ComplexMatrix) {
        let (m, n) = self.a.shape();
        let weights = |range: core::ops::Range<usize>| -> Vec<f64> {
            let w: Vec<f64> = range.clone().map(|k| (-self.u[(k, k)].re).max(0.0)).collect();
            let total: f64 = w.iter().sum();
            if total > 0.0 {
                w.iter().map(|x| libm::sqrt(x / total)).collect()
            } else {
                let len = range.len() as f64;
                w.iter().map(|_| libm::sqrt(1.0 / len)).collect()
            }
        };
        let p = weights(0..m);
        let q = weights(m..m + n);
        let b = ComplexMatrix::from_fn(m, n, |i, j| self.a[(i, j)] * (p[i] * q[j]));
        let start = polar_factor(&b).conj();
        let r = polar_ascent(self.a, start, 8, 1e-15);
        (r.value, r.witness)
    }
}

fn write_off_block(z: &mut ComplexMatrix, a: &ComplexMatrix) {
    let (m, n) = a.shape();
    for i in 0..m {
        for j in 0..n {
            z[(i, m + j)] = a[(i, j)];
            z[(m + j, i)] = a[(i, j)].conj();
        }
    }
}

/// The `t` with `Σ_k max(v_k - t, 0) = mass`. Sorts `values` in place.
fn water_level(values: &mut [f64], mass: f64) -> f64 {
    values.sort_by(|a, b| b.total_cmp(a));
    let mut sum = 0.0;
    for k in 0..values.len() {
        sum += values[k];
        let t = (sum - mass) / (k + 1) as f64;
        if k + 1 == values.len() || t >= values[k + 1] {
            return t;
        }
    }
    unreachable!("non-empty diagonal")
}
