//! JSON documents for matrices, patterns, symbols and reports.
//!
//! Complex numbers are written as `[re, im]` pairs; matrices list their
//! entries in row-major order next to explicit `rows` and `cols`.

use std::path::Path;

use bimod_core::linalg::{ComplexMatrix, LinalgError, C64};
use bimod_core::multiplier::{FactorizationCertificate, NormReport};
use bimod_core::normalizer::NormalizerMatrix;
use bimod_core::pattern::{Block, PatternError, PatternSet, Quadruple, RectanglePartition};
use bimod_core::symbol::{Grid, GridFactorPair, GridSymbol, SymbolError};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("field `{field}`: {message}")]
    Field { field: &'static str, message: String },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl FormatError {
    fn field(field: &'static str, message: impl std::fmt::Display) -> Self {
        Self::Field {
            field,
            message: message.to_string(),
        }
    }
}

pub type Complex = [f64; 2];

fn to_pair(z: C64) -> Complex {
    [z.re, z.im]
}

fn from_pair(p: &Complex) -> C64 {
    C64::new(p[0], p[1])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Complex>,
}

impl MatrixDoc {
    pub fn to_matrix(&self) -> Result<ComplexMatrix, FormatError> {
        if self.entries.len() != self.rows * self.cols {
            return Err(FormatError::field(
                "entries",
                format!(
                    "expected {} pairs for a {}x{} matrix, found {}",
                    self.rows * self.cols,
                    self.rows,
                    self.cols,
                    self.entries.len()
                ),
            ));
        }
        ComplexMatrix::new(self.rows, self.cols, self.entries.iter().map(from_pair).collect())
            .map_err(|e| FormatError::field("entries", e))
    }
}

impl From<&ComplexMatrix> for MatrixDoc {
    fn from(m: &ComplexMatrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            entries: m.as_slice().iter().copied().map(to_pair).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternDoc {
    pub rows: usize,
    pub cols: usize,
    pub cells: Vec<[usize; 2]>,
}

impl PatternDoc {
    pub fn to_pattern(&self) -> Result<PatternSet, FormatError> {
        PatternSet::from_cells(self.rows, self.cols, self.cells.iter().map(|c| (c[0], c[1]))).map_err(|e| match e {
            PatternError::EmptyGrid { .. } => FormatError::field("rows", e),
            other => FormatError::field("cells", other),
        })
    }
}

impl From<&PatternSet> for PatternDoc {
    fn from(p: &PatternSet) -> Self {
        Self {
            rows: p.rows(),
            cols: p.cols(),
            cells: p.cells().map(|(i, j)| [i, j]).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GridDoc {
    pub fn to_grid(&self) -> Result<Grid, FormatError> {
        Grid::new(self.points.clone(), self.weights.clone()).map_err(|e| FormatError::field("grid", e))
    }
}

impl From<&Grid> for GridDoc {
    fn from(g: &Grid) -> Self {
        Self {
            points: g.points().to_vec(),
            weights: g.weights().to_vec(),
        }
    }
}

/// Symbol values on a grid: the matrix format plus a `grid` block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolDoc {
    pub grid: GridDoc,
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Complex>,
}

/// Factor pair `f, g` on a grid, each an `N x rank` matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorPairDoc {
    pub grid: GridDoc,
    pub rank: usize,
    pub f: MatrixDoc,
    pub g: MatrixDoc,
}

impl FactorPairDoc {
    pub fn to_pair(&self) -> Result<GridFactorPair, FormatError> {
        let grid = self.grid.to_grid()?;
        let f = self.f.to_matrix()?;
        let g = self.g.to_matrix()?;
        if f.cols() != self.rank {
            return Err(FormatError::field(
                "rank",
                format!("`f` has {} columns, rank is {}", f.cols(), self.rank),
            ));
        }
        GridFactorPair::new(grid, f, g).map_err(|e| FormatError::field("f", e))
    }
}

impl From<&GridFactorPair> for FactorPairDoc {
    fn from(p: &GridFactorPair) -> Self {
        Self {
            grid: p.grid().into(),
            rank: p.rank(),
            f: p.f().into(),
            g: p.g().into(),
        }
    }
}

/// A symbol given either by its values or by a factor pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SymbolSource {
    Factors(FactorPairDoc),
    Values(SymbolDoc),
}

impl SymbolSource {
    pub fn to_symbol(&self) -> Result<(Grid, GridSymbol), FormatError> {
        match self {
            Self::Factors(doc) => {
                let pair = doc.to_pair()?;
                Ok((pair.grid().clone(), bimod_core::symbol::symbol_from_factors(&pair)))
            }
            Self::Values(doc) => {
                let grid = doc.grid.to_grid()?;
                let values = MatrixDoc {
                    rows: doc.rows,
                    cols: doc.cols,
                    entries: doc.entries.clone(),
                }
                .to_matrix()?;
                if values.shape() != (grid.len(), grid.len()) {
                    return Err(FormatError::field(
                        "grid",
                        format!("{} points but symbol is {}x{}", grid.len(), doc.rows, doc.cols),
                    ));
                }
                let symbol = GridSymbol::new(values).map_err(|e: SymbolError| FormatError::field("entries", e))?;
                Ok((grid, symbol))
            }
        }
    }

    pub fn from_symbol(grid: &Grid, symbol: &GridSymbol) -> Self {
        let m = MatrixDoc::from(symbol.values());
        Self::Values(SymbolDoc {
            grid: grid.into(),
            rows: m.rows,
            cols: m.cols,
            entries: m.entries,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BlockDoc {
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartitionDoc {
    pub rows: usize,
    pub cols: usize,
    pub blocks: Vec<BlockDoc>,
}

impl From<&RectanglePartition> for PartitionDoc {
    fn from(p: &RectanglePartition) -> Self {
        Self {
            rows: p.rows,
            cols: p.cols,
            blocks: p
                .blocks
                .iter()
                .map(|b| BlockDoc {
                    rows: b.rows.clone(),
                    cols: b.cols.clone(),
                })
                .collect(),
        }
    }
}

impl PartitionDoc {
    pub fn to_partition(&self) -> RectanglePartition {
        RectanglePartition {
            rows: self.rows,
            cols: self.cols,
            blocks: self
                .blocks
                .iter()
                .map(|b| Block {
                    rows: b.rows.clone(),
                    cols: b.cols.clone(),
                })
                .collect(),
        }
    }
}

/// A 2x2 subgrid with exactly three cells, as `[i1, i2, j1, j2]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WitnessDoc {
    pub three_of_four: bool,
    pub witness: [usize; 4],
}

impl From<Quadruple> for WitnessDoc {
    fn from(q: Quadruple) -> Self {
        Self {
            three_of_four: false,
            witness: [q.i1, q.i2, q.j1, q.j2],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateDoc {
    pub value: f64,
    pub residual: f64,
    pub row_vectors: Vec<Vec<Complex>>,
    pub col_vectors: Vec<Vec<Complex>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormReportDoc {
    pub sdp_value: f64,
    pub lower_bound: f64,
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
    pub certificate: CertificateDoc,
    pub witness: MatrixDoc,
}

fn vectors_doc(v: &[Vec<C64>]) -> Vec<Vec<Complex>> {
    v.iter().map(|x| x.iter().copied().map(to_pair).collect()).collect()
}

fn vectors_from_doc(v: &[Vec<Complex>]) -> Vec<Vec<C64>> {
    v.iter().map(|x| x.iter().map(from_pair).collect()).collect()
}

impl From<&NormReport> for NormReportDoc {
    fn from(r: &NormReport) -> Self {
        Self {
            sdp_value: r.sdp_value,
            lower_bound: r.lower_bound,
            residual: r.certificate.residual,
            converged: r.converged,
            iterations: r.iterations,
            certificate: CertificateDoc {
                value: r.certificate.value,
                residual: r.certificate.residual,
                row_vectors: vectors_doc(&r.certificate.row_vectors),
                col_vectors: vectors_doc(&r.certificate.col_vectors),
            },
            witness: (&r.witness).into(),
        }
    }
}

impl NormReportDoc {
    pub fn to_report(&self) -> Result<NormReport, FormatError> {
        Ok(NormReport {
            sdp_value: self.sdp_value,
            lower_bound: self.lower_bound,
            certificate: FactorizationCertificate {
                row_vectors: vectors_from_doc(&self.certificate.row_vectors),
                col_vectors: vectors_from_doc(&self.certificate.col_vectors),
                value: self.certificate.value,
                residual: self.certificate.residual,
            },
            witness: self.witness.to_matrix()?,
            iterations: self.iterations,
            converged: self.converged,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizerDoc {
    pub is_normalizer: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conflict: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<PatternDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polar_isometry: Option<MatrixDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modulus: Option<Vec<f64>>,
}

impl From<&NormalizerMatrix> for NormalizerDoc {
    fn from(t: &NormalizerMatrix) -> Self {
        Self {
            is_normalizer: true,
            conflict: None,
            pattern: Some(t.pattern().into()),
            polar_isometry: Some(t.polar_isometry().into()),
            modulus: Some(t.modulus().to_vec()),
        }
    }
}

/// Diagonal entries, e.g. of `D_T` or of the composition symbol `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagonalDoc {
    pub diagonal: Vec<Complex>,
}

impl DiagonalDoc {
    pub fn new(values: &[C64]) -> Self {
        Self {
            diagonal: values.iter().copied().map(to_pair).collect(),
        }
    }
}

pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T, FormatError> {
    Ok(serde_json::from_str(text)?)
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, FormatError> {
    let text = std::fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text)
}

/// Pretty-printed JSON with a trailing newline.
pub fn render<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents serialize");
    s.push('\n');
    s
}

pub fn read_matrix(path: &Path) -> Result<ComplexMatrix, FormatError> {
    read::<MatrixDoc>(path)?.to_matrix()
}

pub fn read_pattern(path: &Path) -> Result<PatternSet, FormatError> {
    read::<PatternDoc>(path)?.to_pattern()
}

impl From<LinalgError> for FormatError {
    fn from(e: LinalgError) -> Self {
        FormatError::field("entries", e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn missing_field_is_named() {
        let err = parse::<MatrixDoc>(r#"{"rows": 2, "cols": 2}"#).unwrap_err();
        assert!(err.to_string().contains("missing field `entries`"), "{err}");
    }

    #[test]
    fn entry_count_checked() {
        let doc: MatrixDoc = parse(r#"{"rows": 1, "cols": 2, "entries": [[1, 0]]}"#).unwrap();
        let err = doc.to_matrix().unwrap_err();
        assert!(err.to_string().starts_with("field `entries`"), "{err}");
    }

    #[test]
    fn pattern_cells_checked() {
        let doc: PatternDoc = parse(r#"{"rows": 2, "cols": 2, "cells": [[0, 0], [2, 1]]}"#).unwrap();
        assert!(doc.to_pattern().unwrap_err().to_string().contains("outside"));
    }

    #[test]
    fn symbol_source_detects_factors() {
        let text = r#"{"grid": {"points": [0, 1], "weights": [1, 1]}, "rank": 1,
            "f": {"rows": 2, "cols": 1, "entries": [[1, 0], [0, 0]]},
            "g": {"rows": 2, "cols": 1, "entries": [[1, 0], [1, 0]]}}"#;
        let src: SymbolSource = parse(text).unwrap();
        assert!(matches!(src, SymbolSource::Factors(_)));
        let (_, phi) = src.to_symbol().unwrap();
        assert_eq!(phi.values().as_slice()[..2], [C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
    }
}
