//! Norms of all idempotent Schur multipliers on a small grid.
//!
//! For every 0/1 pattern `E` the scan computes `‖S_χE‖` and checks it
//! against the combinatorics: the norm is 1 exactly for the non-empty 3-of-4
//! patterns, and no norm falls strictly between 1 and `2/√3`.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::sdp::{haagerup_norm_with, SdpOptions};
use super::{MultiplierError, TWO_OVER_ROOT_THREE};
use crate::pattern::{decompose_rectangles, has_three_of_four, is_tro_closed, PatternSet};

/// Largest `rows * cols` enumerated exhaustively.
pub const EXHAUSTIVE_CELL_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Exhaustive,
    /// `count` patterns with each cell present independently with probability 1/2.
    Sampled {
        count: usize,
        seed: u64,
    },
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    pub mode: ScanMode,
    /// Classification tolerance: "norm 1" means `norm <= 1 + tol` and the gap
    /// is the open interval `(1 + tol, 2/√3 - tol)`.
    pub tol: f64,
    pub sdp: SdpOptions,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            mode: ScanMode::Exhaustive,
            tol: 1e-4,
            sdp: SdpOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRecord {
    pub pattern: PatternSet,
    pub norm: f64,
    pub three_of_four: bool,
    pub tro_closed: bool,
    pub decomposable: bool,
    pub converged: bool,
}

#[derive(Clone, Debug)]
pub struct ScanReport {
    pub rows: usize,
    pub cols: usize,
    pub tol: f64,
    /// Sorted by pattern bits (row-major, cell `(i, j)` is bit `i * cols + j`).
    pub records: Vec<ScanRecord>,
    /// Observed norms, merged when closer than `1e-6`.
    pub distinct_norms: Vec<f64>,
    /// Non-empty patterns: `norm <= 1 + tol` exactly when 3-of-4 holds.
    pub equivalence_holds: bool,
    /// No norm in `(1 + tol, 2/√3 - tol)`.
    pub gap_empty: bool,
    /// 3-of-4, TRO-closed and decomposable agree on every pattern.
    pub structure_consistent: bool,
    pub all_converged: bool,
    /// Patterns breaking one of the three checks above.
    pub violations: Vec<PatternSet>,
}

impl ScanReport {
    /// Deterministic reduction: records are sorted before anything is derived,
    /// so the report does not depend on evaluation order.
    pub fn from_records(rows: usize, cols: usize, tol: f64, mut records: Vec<ScanRecord>) -> Self {
        records.sort_by_key(|r| pattern_key(&r.pattern));
        let upper = TWO_OVER_ROOT_THREE - tol;
        let mut violations = Vec::new();
        let (mut equivalence_holds, mut gap_empty, mut structure_consistent) = (true, true, true);
        for r in &records {
            let mut bad = false;
            if !r.pattern.is_empty() {
                if (r.norm <= 1.0 + tol) != r.three_of_four {
                    equivalence_holds = false;
                    bad = true;
                }
                if r.norm > 1.0 + tol && r.norm < upper {
                    gap_empty = false;
                    bad = true;
                }
            }
            if r.three_of_four != r.tro_closed || r.three_of_four != r.decomposable {
                structure_consistent = false;
                bad = true;
            }
            if bad {
                violations.push(r.pattern.clone());
            }
        }
        let mut norms: Vec<f64> = records.iter().map(|r| r.norm).collect();
        norms.sort_by(f64::total_cmp);
        let mut distinct_norms: Vec<f64> = Vec::new();
        for v in norms {
            if distinct_norms.last().is_none_or(|&last| v - last > 1e-6) {
                distinct_norms.push(v);
            }
        }
        let all_converged = records.iter().all(|r| r.converged);
        Self {
            rows,
            cols,
            tol,
            records,
            distinct_norms,
            equivalence_holds,
            gap_empty,
            structure_consistent,
            all_converged,
            violations,
        }
    }

    pub fn max_norm(&self) -> f64 {
        self.records.iter().map(|r| r.norm).fold(0.0, f64::max)
    }
}

fn pattern_key(p: &PatternSet) -> Vec<usize> {
    // Cell list in row-major order, reversed so that comparing keys matches
    // comparing bit masks for patterns that fit in 64 bits.
    let mut cells: Vec<usize> = p.cells().map(|(i, j)| i * p.cols() + j).collect();
    cells.reverse();
    cells
}

/// The patterns a scan visits, in enumeration order.
pub fn scan_patterns(rows: usize, cols: usize, mode: ScanMode) -> Result<Vec<PatternSet>, MultiplierError> {
    let cells = rows * cols;
    match mode {
        ScanMode::Exhaustive => {
            if cells > EXHAUSTIVE_CELL_LIMIT {
                return Err(MultiplierError::BudgetExceeded {
                    rows,
                    cols,
                    limit: EXHAUSTIVE_CELL_LIMIT,
                });
            }
            (0..1u64 << cells)
                .map(|bits| PatternSet::from_bits(rows, cols, bits).map_err(|_| budget(rows, cols)))
                .collect()
        }
        ScanMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = Vec::with_capacity(count);
            for _ in 0..count {
                let mut p = PatternSet::new(rows, cols).map_err(|_| budget(rows, cols))?;
                for i in 0..rows {
                    for j in 0..cols {
                        if rng.random::<bool>() {
                            p.insert(i, j).expect("in range");
                        }
                    }
                }
                out.push(p);
            }
            Ok(out)
        }
    }
}

fn budget(rows: usize, cols: usize) -> MultiplierError {
    MultiplierError::BudgetExceeded {
        rows,
        cols,
        limit: EXHAUSTIVE_CELL_LIMIT,
    }
}

/// Drops empty rows and columns and keeps one copy of each repeated row and
/// column. `‖S_χE‖` is unchanged: repeated rows share a factor vector and
/// empty rows take the zero vector.
pub fn reduce_pattern(e: &PatternSet) -> Option<PatternSet> {
    let mut row_keys: Vec<Vec<usize>> = Vec::new();
    for i in 0..e.rows() {
        let row: Vec<usize> = e.row_cells(i).collect();
        if !row.is_empty() && !row_keys.contains(&row) {
            row_keys.push(row);
        }
    }
    if row_keys.is_empty() {
        return None;
    }
    let mut col_keys: Vec<(usize, Vec<usize>)> = Vec::new();
    for j in 0..e.cols() {
        let col: Vec<usize> = (0..row_keys.len()).filter(|&r| row_keys[r].contains(&j)).collect();
        if !col.is_empty() && !col_keys.iter().any(|(_, c)| *c == col) {
            col_keys.push((j, col));
        }
    }
    let cells = col_keys
        .iter()
        .enumerate()
        .flat_map(|(c, (_, rows))| rows.iter().map(move |&r| (r, c)));
    PatternSet::from_cells(row_keys.len(), col_keys.len(), cells).ok()
}

/// Norm and convergence flag keyed by the shape and cells of a reduced pattern.
pub type NormCache = BTreeMap<(usize, usize, Vec<(usize, usize)>), (f64, bool)>;

/// Norm and structural flags of one pattern. `cache` memoizes norms of
/// reduced patterns across calls.
pub fn evaluate_pattern(e: &PatternSet, sdp: &SdpOptions, cache: &mut NormCache) -> ScanRecord {
    let (norm, converged) = match reduce_pattern(e) {
        None => (0.0, true),
        Some(r) => {
            let key = (r.rows(), r.cols(), r.cells().collect());
            *cache
                .entry(key)
                .or_insert_with(|| match haagerup_norm_with(&r.indicator(), sdp) {
                    Ok(rep) => (rep.sdp_value, true),
                    Err(MultiplierError::NoConvergence(rep)) => (rep.sdp_value, false),
                    Err(_) => (f64::NAN, false),
                })
        }
    };
    ScanRecord {
        pattern: e.clone(),
        norm,
        three_of_four: has_three_of_four(e),
        tro_closed: is_tro_closed(e),
        decomposable: decompose_rectangles(e).is_ok(),
        converged,
    }
}

/// Sequential scan over the grid; see [`ScanReport`].
pub fn gap_scan(rows: usize, cols: usize, opts: &ScanOptions) -> Result<ScanReport, MultiplierError> {
    let patterns = scan_patterns(rows, cols, opts.mode)?;
    let mut cache = BTreeMap::new();
    let records = patterns
        .iter()
        .map(|p| evaluate_pattern(p, &opts.sdp, &mut cache))
        .collect();
    Ok(ScanReport::from_records(rows, cols, opts.tol, records))
}
