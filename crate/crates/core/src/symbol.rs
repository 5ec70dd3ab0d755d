//! Symbol calculus for bimodule maps over the multiplication masa of a
//! finite grid.
//!
//! A pair of vector-valued functions `f, g: X -> C^r` defines the map
//! `Φ(T) = Σ_n M_{f_n} T M_{g_n}`. On an integral operator with kernel `k`
//! it acts as multiplication of the kernel by the symbol
//! `φ(s,t) = Σ_n f_n(s) g_n(t)`. On a finite grid with positive weights there
//! are no null sets, so the symbol is determined entrywise by the map.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::linalg::{operator_norm, ComplexMatrix, LinalgError, C64};
use crate::pattern::{decompose_rectangles, PatternError, PatternSet, Quadruple, RectanglePartition};

/// Default threshold separating zero from non-zero symbol values.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SymbolError {
    #[error("grid weights must be positive and finite (point {index})")]
    BadWeight { index: usize },
    #[error("grid has no points")]
    EmptyGrid,
    #[error("grid mismatch: expected {expected} points, found {found}")]
    GridMismatch { expected: usize, found: usize },
    #[error("factor rank must be at least 1")]
    ZeroRank,
    #[error("symbol is not idempotent at ({s}, {t}): value {value}")]
    NotIdempotent { s: usize, t: usize, value: C64 },
    #[error("support fails the 3-of-4 property at {0}")]
    NotThreeOfFour(Quadruple),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Finite measure space: points `0..N` with labels and positive weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Self, SymbolError> {
        if points.is_empty() {
            return Err(SymbolError::EmptyGrid);
        }
        if points.len() != weights.len() {
            return Err(SymbolError::GridMismatch {
                expected: points.len(),
                found: weights.len(),
            });
        }
        if let Some(index) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(SymbolError::BadWeight { index });
        }
        Ok(Self { points, weights })
    }

    /// `n` points labelled `0, 1, ..` with unit weights.
    pub fn counting(n: usize) -> Result<Self, SymbolError> {
        Self::new((0..n).map(|k| k as f64).collect(), alloc::vec![1.0; n])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Norm of the integral operator `(T_k h)(s) = Σ_t k(s,t) h(t) μ(t)` on
    /// `L²(X, μ)`, i.e. `‖D_μ^{1/2} K D_μ^{1/2}‖`.
    pub fn kernel_operator_norm(&self, k: &ComplexMatrix) -> Result<f64, SymbolError> {
        self.check_kernel(k)?;
        let w: Vec<f64> = self.weights.iter().map(|&x| libm::sqrt(x)).collect();
        let scaled = ComplexMatrix::new(
            k.rows(),
            k.cols(),
            k.as_slice()
                .iter()
                .enumerate()
                .map(|(idx, &z)| z * (w[idx / k.cols()] * w[idx % k.cols()]))
                .collect(),
        )?;
        Ok(operator_norm(&scaled))
    }

    fn check_kernel(&self, k: &ComplexMatrix) -> Result<(), SymbolError> {
        let n = self.len();
        if k.shape() != (n, n) {
            return Err(LinalgError::DimensionMismatch {
                expected: (n, n),
                found: k.shape(),
            }
            .into());
        }
        Ok(())
    }
}

/// `f, g: X -> C^r`, stored as `N x r` matrices (row `s` is `f(s)`), with
/// `B_f = max_s ‖f(s)‖²` and `B_g = max_t ‖g(t)‖²`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFactorPair {
    grid: Grid,
    f: ComplexMatrix,
    g: ComplexMatrix,
    b_f: f64,
    b_g: f64,
}

impl GridFactorPair {
    pub fn new(grid: Grid, f: ComplexMatrix, g: ComplexMatrix) -> Result<Self, SymbolError> {
        for m in [&f, &g] {
            if m.rows() != grid.len() {
                return Err(SymbolError::GridMismatch {
                    expected: grid.len(),
                    found: m.rows(),
                });
            }
        }
        if f.cols() == 0 {
            return Err(SymbolError::ZeroRank);
        }
        if f.cols() != g.cols() {
            return Err(LinalgError::DimensionMismatch {
                expected: f.shape(),
                found: g.shape(),
            }
            .into());
        }
        let b_f = max_row_norm_sqr(&f);
        let b_g = max_row_norm_sqr(&g);
        Ok(Self { grid, f, g, b_f, b_g })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rank(&self) -> usize {
        self.f.cols()
    }

    pub fn f(&self) -> &ComplexMatrix {
        &self.f
    }

    pub fn g(&self) -> &ComplexMatrix {
        &self.g
    }

    pub fn b_f(&self) -> f64 {
        self.b_f
    }

    pub fn b_g(&self) -> f64 {
        self.b_g
    }

    /// `sqrt(B_f · B_g)`, an upper bound for the norm of the induced map.
    pub fn norm_bound(&self) -> f64 {
        libm::sqrt(self.b_f * self.b_g)
    }

    /// Diagonal matrix `M_{f_n}`.
    pub fn f_multiplier(&self, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.f.column(n))
    }

    /// Diagonal matrix `M_{g_n}`.
    pub fn g_multiplier(&self, n: usize) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&self.g.column(n))
    }
}

fn max_row_norm_sqr(m: &ComplexMatrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|z| z.norm_sqr()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Symbol `φ(s,t)` on an `N x N` grid, optionally remembering the factor
/// pair it came from.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSymbol {
    values: ComplexMatrix,
    provenance: Option<Box<GridFactorPair>>,
}

impl GridSymbol {
    pub fn new(values: ComplexMatrix) -> Result<Self, SymbolError> {
        if !values.is_square() {
            return Err(LinalgError::NotSquare {
                rows: values.rows(),
                cols: values.cols(),
            }
            .into());
        }
        Ok(Self {
            values,
            provenance: None,
        })
    }

    /// Indicator symbol `χ_E` of a square pattern.
    pub fn indicator(e: &PatternSet) -> Result<Self, SymbolError> {
        Self::new(e.indicator())
    }

    pub fn values(&self) -> &ComplexMatrix {
        &self.values
    }

    pub fn size(&self) -> usize {
        self.values.rows()
    }

    pub fn provenance(&self) -> Option<&GridFactorPair> {
        self.provenance.as_deref()
    }
}

/// `φ(s,t) = Σ_n f_n(s) g_n(t) = ⟨f(s), conj(g(t))⟩`.
pub fn symbol_from_factors(p: &GridFactorPair) -> GridSymbol {
    let values = p.f() * &p.g().transpose();
    GridSymbol {
        values,
        provenance: Some(Box::new(p.clone())),
    }
}

fn check_size(expected: usize, found: (usize, usize)) -> Result<(), SymbolError> {
    if found != (expected, expected) {
        return Err(LinalgError::DimensionMismatch {
            expected: (expected, expected),
            found,
        }
        .into());
    }
    Ok(())
}

/// `Φ_φ(T_k) = T_{φk}`: the kernel multiplied entrywise by the symbol.
pub fn apply_to_kernel(phi: &GridSymbol, k: &ComplexMatrix) -> Result<ComplexMatrix, SymbolError> {
    check_size(phi.size(), k.shape())?;
    Ok(phi.values.hadamard(k)?)
}

/// Product symbol `φψ`, the symbol of `Φ_φ ∘ Φ_ψ`.
pub fn compose_symbols(phi: &GridSymbol, psi: &GridSymbol) -> Result<GridSymbol, SymbolError> {
    check_size(phi.size(), psi.values.shape())?;
    GridSymbol::new(phi.values.hadamard(&psi.values)?)
}

/// Cells where `|φ(s,t)| > tol`.
pub fn support_of_symbol(phi: &GridSymbol, tol: f64) -> PatternSet {
    let n = phi.size();
    let mut e = PatternSet::new(n.max(1), n.max(1)).expect("non-empty grid");
    for s in 0..n {
        for t in 0..n {
            if phi.values[(s, t)].norm() > tol {
                e.insert(s, t).expect("in range");
            }
        }
    }
    e
}

/// Whether `Φ_φ` sends every matrix unit `E_st` to zero (within `tol`).
pub fn annihilates_matrix_units(phi: &GridSymbol, tol: f64) -> bool {
    let n = phi.size();
    (0..n).all(|s| {
        (0..n).all(|t| {
            let mut unit = ComplexMatrix::zeros(n, n);
            unit[(s, t)] = C64::new(1.0, 0.0);
            apply_to_kernel(phi, &unit).is_ok_and(|img| img.max_abs() <= tol)
        })
    })
}

/// Rectangle decomposition of an idempotent symbol.
///
/// Succeeds when `φ² = φ` entrywise (so `φ` is a 0/1 indicator `χ_E`) and `E`
/// has the 3-of-4 property. A symbol built from factors with
/// `sqrt(B_f B_g) < 2/√3` always satisfies the second condition.
pub fn check_idempotent_symbol(phi: &GridSymbol, tol: f64) -> Result<RectanglePartition, SymbolError> {
    let n = phi.size();
    for s in 0..n {
        for t in 0..n {
            let z = phi.values[(s, t)];
            if (z * z - z).norm() > tol {
                return Err(SymbolError::NotIdempotent { s, t, value: z });
            }
        }
    }
    let support = support_of_symbol(phi, 0.5);
    decompose_rectangles(&support).map_err(|e| match e {
        PatternError::NotThreeOfFour(q) => SymbolError::NotThreeOfFour(q),
        other => unreachable!("decomposition only fails on 3-of-4: {other}"),
    })
}
