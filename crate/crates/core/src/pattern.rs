//! Support sets of idempotent Schur multipliers.
//!
//! A [`PatternSet`] `E` is a subset of a finite `rows x cols` grid; the
//! multiplier `χ_E` keeps the entries of a matrix inside `E` and zeroes the
//! rest. This module decides the 3-of-4 property, splits 3-of-4 patterns into
//! disjoint rectangles, and computes the closure under the triple product
//! `(i,j), (k,j), (k,n) => (i,n)`.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{ComplexMatrix, C64};

const WORD: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PatternError {
    #[error("pattern grid must have at least one row and one column, got {rows}x{cols}")]
    EmptyGrid { rows: usize, cols: usize },
    #[error("cell ({i}, {j}) is outside the {rows}x{cols} grid")]
    OutOfRange {
        i: usize,
        j: usize,
        rows: usize,
        cols: usize,
    },
    #[error("cannot compose a {left_rows}x{left_cols} pattern with a {right_rows}x{right_cols} pattern")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },
    #[error("pattern fails the 3-of-4 property at {0}")]
    NotThreeOfFour(Quadruple),
}

/// Rows `i1 < i2` and columns `j1 < j2` of a 2x2 subgrid holding exactly three
/// cells of a pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Quadruple {
    pub i1: usize,
    pub i2: usize,
    pub j1: usize,
    pub j2: usize,
}

impl fmt::Display for Quadruple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {}, {})", self.i1, self.i2, self.j1, self.j2)
    }
}

/// Finite pattern stored as a packed bit grid, one run of 64-bit words per row.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PatternSet {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl PatternSet {
    /// Empty pattern on a `rows x cols` grid.
    pub fn new(rows: usize, cols: usize) -> Result<Self, PatternError> {
        if rows == 0 || cols == 0 {
            return Err(PatternError::EmptyGrid { rows, cols });
        }
        let words_per_row = cols.div_ceil(WORD);
        Ok(Self {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        })
    }

    pub fn from_cells<I>(rows: usize, cols: usize, cells: I) -> Result<Self, PatternError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut p = Self::new(rows, cols)?;
        for (i, j) in cells {
            p.insert(i, j)?;
        }
        Ok(p)
    }

    /// Every cell of the grid.
    pub fn full(rows: usize, cols: usize) -> Result<Self, PatternError> {
        let mut p = Self::new(rows, cols)?;
        for i in 0..rows {
            for j in 0..cols {
                p.set(i, j);
            }
        }
        Ok(p)
    }

    /// The diagonal `{(i, i)}` of an `n x n` grid.
    pub fn diagonal(n: usize) -> Result<Self, PatternError> {
        Self::from_cells(n, n, (0..n).map(|i| (i, i)))
    }

    /// Pattern whose cell `(i, j)` is bit `i * cols + j` of `bits`.
    /// Requires `rows * cols <= 64`.
    pub fn from_bits(rows: usize, cols: usize, bits: u64) -> Result<Self, PatternError> {
        let mut p = Self::new(rows, cols)?;
        assert!(rows * cols <= 64, "from_bits needs at most 64 cells");
        for k in 0..rows * cols {
            if bits >> k & 1 == 1 {
                p.set(k / cols, k % cols);
            }
        }
        Ok(p)
    }

    /// Inverse of [`PatternSet::from_bits`]; `None` above 64 cells.
    pub fn to_bits(&self) -> Option<u64> {
        if self.rows * self.cols > 64 {
            return None;
        }
        Some(self.cells().fold(0u64, |acc, (i, j)| acc | 1 << (i * self.cols + j)))
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn contains(&self, i: usize, j: usize) -> bool {
        i < self.rows && j < self.cols && self.row_words(i)[j / WORD] >> (j % WORD) & 1 == 1
    }

    /// Adds a cell; returns whether it was newly inserted.
    pub fn insert(&mut self, i: usize, j: usize) -> Result<bool, PatternError> {
        if i >= self.rows || j >= self.cols {
            return Err(PatternError::OutOfRange {
                i,
                j,
                rows: self.rows,
                cols: self.cols,
            });
        }
        let fresh = !self.contains(i, j);
        self.set(i, j);
        Ok(fresh)
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        let w = self.words_per_row;
        self.bits[i * w + j / WORD] |= 1 << (j % WORD);
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |i| self.row_cells(i).map(move |j| (i, j)))
    }

    /// Columns present in row `i`, ascending.
    pub fn row_cells(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(i).iter().enumerate().flat_map(|(k, &word)| {
            let mut w = word;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(k * WORD + b)
            })
        })
    }

    pub fn row_is_empty(&self, i: usize) -> bool {
        self.row_words(i).iter().all(|&w| w == 0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.bits.iter().zip(&other.bits).all(|(a, b)| a & !b == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::new(self.cols, self.rows).expect("non-empty grid");
        for (i, j) in self.cells() {
            t.set(j, i);
        }
        t
    }

    /// Union of two patterns on the same grid.
    pub fn union(&self, other: &Self) -> Result<Self, PatternError> {
        self.same_grid(other)?;
        let mut out = self.clone();
        out.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a |= b);
        Ok(out)
    }

    pub fn intersection(&self, other: &Self) -> Result<Self, PatternError> {
        self.same_grid(other)?;
        let mut out = self.clone();
        out.bits.iter_mut().zip(&other.bits).for_each(|(a, b)| *a &= b);
        Ok(out)
    }

    fn same_grid(&self, other: &Self) -> Result<(), PatternError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(PatternError::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        Ok(())
    }

    /// The 0/1 matrix `χ_E`.
    pub fn indicator(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for (i, j) in self.cells() {
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        m
    }
}

impl fmt::Debug for PatternSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PatternSet({}x{}, ", self.rows, self.cols)?;
        f.debug_set().entries(self.cells()).finish()?;
        write!(f, ")")
    }
}

/// One rectangle `rows x cols` of a [`RectanglePartition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

/// Disjoint rectangles whose union is a 3-of-4 pattern. Blocks are ordered by
/// their least row index; row and column lists are ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectanglePartition {
    pub rows: usize,
    pub cols: usize,
    pub blocks: Vec<Block>,
}

impl RectanglePartition {
    /// Union of `rows x cols` over all blocks.
    pub fn reassemble(&self) -> Result<PatternSet, PatternError> {
        let mut p = PatternSet::new(self.rows, self.cols)?;
        for b in &self.blocks {
            for &i in &b.rows {
                for &j in &b.cols {
                    p.insert(i, j)?;
                }
            }
        }
        Ok(p)
    }
}

/// First 2x2 subgrid with exactly three cells, in the order of the row pair
/// `(i1, i2)`.
///
/// Two rows sharing a column must have identical column sets: otherwise a
/// shared column and a column in the symmetric difference span three cells.
/// This makes the check `O(rows^2 * cols / 64)`.
pub fn three_of_four_violation(e: &PatternSet) -> Option<Quadruple> {
    for i1 in 0..e.rows {
        let r1 = e.row_words(i1);
        if r1.iter().all(|&w| w == 0) {
            continue;
        }
        for i2 in i1 + 1..e.rows {
            let r2 = e.row_words(i2);
            let shared = first_bit(r1.iter().zip(r2).map(|(a, b)| a & b));
            let Some(j_shared) = shared else { continue };
            if let Some(j_diff) = first_bit(r1.iter().zip(r2).map(|(a, b)| a ^ b)) {
                return Some(Quadruple {
                    i1,
                    i2,
                    j1: j_shared.min(j_diff),
                    j2: j_shared.max(j_diff),
                });
            }
        }
    }
    None
}

fn first_bit(words: impl Iterator<Item = u64>) -> Option<usize> {
    for (k, w) in words.enumerate() {
        if w != 0 {
            return Some(k * WORD + w.trailing_zeros() as usize);
        }
    }
    None
}

/// Whether every 2x2 subgrid holding three cells of `e` also holds the fourth.
pub fn has_three_of_four(e: &PatternSet) -> bool {
    three_of_four_violation(e).is_none()
}

/// Splits a 3-of-4 pattern into disjoint rectangles `I_t x J_t`.
///
/// Rows are related when they share a column; under the 3-of-4 property
/// related rows have equal column sets, so each class is a group of identical
/// non-empty rows and its column set is the common row.
pub fn decompose_rectangles(e: &PatternSet) -> Result<RectanglePartition, PatternError> {
    if let Some(q) = three_of_four_violation(e) {
        return Err(PatternError::NotThreeOfFour(q));
    }
    let mut class_of: BTreeMap<&[u64], usize> = BTreeMap::new();
    let mut blocks: Vec<Block> = Vec::new();
    for i in 0..e.rows {
        if e.row_is_empty(i) {
            continue;
        }
        let key = e.row_words(i);
        let t = *class_of.entry(key).or_insert_with(|| {
            blocks.push(Block {
                rows: Vec::new(),
                cols: e.row_cells(i).collect(),
            });
            blocks.len() - 1
        });
        blocks[t].rows.push(i);
    }
    Ok(RectanglePartition {
        rows: e.rows,
        cols: e.cols,
        blocks,
    })
}

/// Boolean relation product `{(i, k) : (i, j) in e, (j, k) in f for some j}`.
pub fn compose_patterns(e: &PatternSet, f: &PatternSet) -> Result<PatternSet, PatternError> {
    if e.cols != f.rows {
        return Err(PatternError::DimensionMismatch {
            left_rows: e.rows,
            left_cols: e.cols,
            right_rows: f.rows,
            right_cols: f.cols,
        });
    }
    let mut out = PatternSet::new(e.rows, f.cols)?;
    let w = out.words_per_row;
    for i in 0..e.rows {
        for j in e.row_cells(i) {
            let src = f.row_words(j);
            let dst = &mut out.bits[i * w..(i + 1) * w];
            dst.iter_mut().zip(src).for_each(|(d, s)| *d |= s);
        }
    }
    Ok(out)
}

/// Smallest superset of `e` closed under `(i,j), (k,j), (k,n) => (i,n)`,
/// i.e. under `F -> F F^T F`, iterated to a fixed point.
pub fn tro_closure(e: &PatternSet) -> PatternSet {
    let mut current = e.clone();
    loop {
        let step = compose_patterns(&current, &current.transpose())
            .and_then(|g| compose_patterns(&g, &current))
            .expect("square-compatible shapes");
        let next = current.union(&step).expect("same grid");
        if next == current {
            return current;
        }
        current = next;
    }
}

pub fn is_tro_closed(e: &PatternSet) -> bool {
    tro_closure(e) == *e
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pat(rows: usize, cols: usize, cells: &[(usize, usize)]) -> PatternSet {
        PatternSet::from_cells(rows, cols, cells.iter().copied()).unwrap()
    }

    /// Brute force over all 2x2 subgrids.
    fn naive_three_of_four(e: &PatternSet) -> bool {
        for i1 in 0..e.rows() {
            for i2 in 0..e.rows() {
                for j1 in 0..e.cols() {
                    for j2 in 0..e.cols() {
                        if i1 == i2 || j1 == j2 {
                            continue;
                        }
                        let n = [(i1, j1), (i1, j2), (i2, j1), (i2, j2)]
                            .iter()
                            .filter(|&&(i, j)| e.contains(i, j))
                            .count();
                        if n == 3 {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    #[test]
    fn three_of_four_examples() {
        assert!(has_three_of_four(&PatternSet::full(2, 2).unwrap()));
        assert!(!has_three_of_four(&pat(2, 2, &[(0, 0), (0, 1), (1, 0)])));
        let e = pat(3, 3, &[(0, 0), (1, 0), (2, 1), (2, 2)]);
        assert!(naive_three_of_four(&e));
        assert!(has_three_of_four(&e));
    }

    #[test]
    fn fast_check_matches_naive_on_3x3() {
        for bits in 0..1u64 << 9 {
            let e = PatternSet::from_bits(3, 3, bits).unwrap();
            assert_eq!(has_three_of_four(&e), naive_three_of_four(&e), "{e:?}");
        }
    }

    #[test]
    fn decompose_examples() {
        let p = decompose_rectangles(&PatternSet::full(2, 2).unwrap()).unwrap();
        assert_eq!(
            p.blocks,
            vec![Block {
                rows: vec![0, 1],
                cols: vec![0, 1]
            }]
        );

        let e = pat(4, 3, &[(0, 0), (0, 1), (1, 0), (1, 1), (2, 2), (3, 2)]);
        let p = decompose_rectangles(&e).unwrap();
        assert_eq!(
            p.blocks,
            vec![
                Block {
                    rows: vec![0, 1],
                    cols: vec![0, 1]
                },
                Block {
                    rows: vec![2, 3],
                    cols: vec![2]
                },
            ]
        );
        assert_eq!(p.reassemble().unwrap(), e);

        let err = decompose_rectangles(&pat(2, 2, &[(0, 0), (0, 1), (1, 0)])).unwrap_err();
        assert_eq!(
            err,
            PatternError::NotThreeOfFour(Quadruple {
                i1: 0,
                i2: 1,
                j1: 0,
                j2: 1
            })
        );
    }

    #[test]
    fn closure_examples() {
        let e = pat(3, 4, &[(0, 1), (2, 1), (2, 3)]);
        let mut want = e.clone();
        want.insert(0, 3).unwrap();
        assert_eq!(tro_closure(&e), want);
        assert!(!is_tro_closed(&e));

        let empty = PatternSet::new(3, 3).unwrap();
        assert_eq!(tro_closure(&empty), empty);
        let single = pat(2, 2, &[(1, 1)]);
        assert_eq!(tro_closure(&single), single);

        assert!(is_tro_closed(&pat(3, 3, &[(0, 0), (0, 1), (1, 2), (2, 2)])));
        assert!(is_tro_closed(&PatternSet::full(3, 4).unwrap()));
    }

    #[test]
    fn compose_examples() {
        let f = pat(3, 3, &[(0, 2), (1, 1), (2, 0), (2, 1)]);
        assert_eq!(compose_patterns(&PatternSet::diagonal(3).unwrap(), &f).unwrap(), f);
        assert!(compose_patterns(&PatternSet::new(3, 3).unwrap(), &f)
            .unwrap()
            .is_empty());
        let single = compose_patterns(&pat(3, 3, &[(0, 1)]), &pat(3, 3, &[(1, 2)])).unwrap();
        assert_eq!(single, pat(3, 3, &[(0, 2)]));
        assert!(matches!(
            compose_patterns(&PatternSet::new(2, 3).unwrap(), &PatternSet::new(2, 3).unwrap()),
            Err(PatternError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn wide_rows_span_several_words() {
        let mut e = PatternSet::new(3, 130).unwrap();
        e.insert(0, 129).unwrap();
        e.insert(1, 129).unwrap();
        e.insert(1, 3).unwrap();
        let q = three_of_four_violation(&e).unwrap();
        assert_eq!(
            q,
            Quadruple {
                i1: 0,
                i2: 1,
                j1: 3,
                j2: 129
            }
        );
        assert_eq!(e.row_cells(1).collect::<Vec<_>>(), vec![3, 129]);
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(PatternSet::new(0, 3), Err(PatternError::EmptyGrid { .. })));
        assert!(matches!(
            PatternSet::from_cells(2, 2, [(2, 0)]),
            Err(PatternError::OutOfRange { i: 2, j: 0, .. })
        ));
        let mut e = PatternSet::new(2, 2).unwrap();
        assert!(e.insert(1, 1).unwrap());
        assert!(!e.insert(1, 1).unwrap());
        assert_eq!(e.len(), 1);
    }
}
