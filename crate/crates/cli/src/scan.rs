//! Worker-pool pattern scans and their CSV form.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use bimod_core::multiplier::{evaluate_pattern, scan_patterns, MultiplierError, ScanOptions, ScanRecord, ScanReport};
use bimod_core::pattern::PatternSet;
use serde::{Deserialize, Serialize};

use crate::formats::FormatError;

/// [`bimod_core::multiplier::gap_scan`] with pattern evaluations spread over
/// `workers` threads. Each worker keeps its own norm cache; the report is the
/// same for every worker count.
pub fn parallel_gap_scan(
    rows: usize,
    cols: usize,
    opts: &ScanOptions,
    workers: usize,
) -> Result<ScanReport, MultiplierError> {
    let patterns = scan_patterns(rows, cols, opts.mode)?;
    let workers = workers.max(1).min(patterns.len().max(1));
    let records: Vec<ScanRecord> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let patterns = &patterns;
                scope.spawn(move || {
                    let mut cache = BTreeMap::new();
                    patterns
                        .iter()
                        .skip(w)
                        .step_by(workers)
                        .map(|p| evaluate_pattern(p, &opts.sdp, &mut cache))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("scan worker panicked"))
            .collect()
    });
    Ok(ScanReport::from_records(rows, cols, opts.tol, records))
}

/// Row-major 0/1 string of a pattern, `rows * cols` characters long.
pub fn pattern_bits(p: &PatternSet) -> String {
    (0..p.rows())
        .flat_map(|i| (0..p.cols()).map(move |j| (i, j)))
        .map(|(i, j)| if p.contains(i, j) { '1' } else { '0' })
        .collect()
}

pub fn pattern_from_bits(rows: usize, cols: usize, bits: &str) -> Result<PatternSet, FormatError> {
    if bits.len() != rows * cols {
        return Err(FormatError::Field {
            field: "pattern-bits",
            message: format!("expected {} characters, found {}", rows * cols, bits.len()),
        });
    }
    let mut p = PatternSet::new(rows, cols).map_err(|e| FormatError::Field {
        field: "rows",
        message: e.to_string(),
    })?;
    for (k, c) in bits.chars().enumerate() {
        match c {
            '1' => {
                p.insert(k / cols, k % cols).expect("in range");
            }
            '0' => {}
            other => {
                return Err(FormatError::Field {
                    field: "pattern-bits",
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    #[serde(rename = "pattern-bits")]
    pub pattern_bits: String,
    pub norm: f64,
    pub three_of_four: bool,
    pub tro_closed: bool,
}

/// Summary written as `# key=value` lines after the CSV rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub rows: usize,
    pub cols: usize,
    pub patterns: usize,
    pub tol: f64,
    pub max_norm: f64,
    pub gap_empty: bool,
    pub equivalence_holds: bool,
    pub structure_consistent: bool,
    pub all_converged: bool,
    pub distinct_norms: Vec<f64>,
}

/// Whole scan document: one row per pattern plus the summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanTable {
    pub summary: ScanSummary,
    pub records: Vec<ScanRow>,
}

impl From<&ScanReport> for ScanTable {
    fn from(r: &ScanReport) -> Self {
        Self {
            summary: ScanSummary {
                rows: r.rows,
                cols: r.cols,
                patterns: r.records.len(),
                tol: r.tol,
                max_norm: r.max_norm(),
                gap_empty: r.gap_empty,
                equivalence_holds: r.equivalence_holds,
                structure_consistent: r.structure_consistent,
                all_converged: r.all_converged,
                distinct_norms: r.distinct_norms.clone(),
            },
            records: r
                .records
                .iter()
                .map(|x| ScanRow {
                    pattern_bits: pattern_bits(&x.pattern),
                    norm: x.norm,
                    three_of_four: x.three_of_four,
                    tro_closed: x.tro_closed,
                })
                .collect(),
        }
    }
}

impl ScanTable {
    pub fn to_csv(&self) -> Result<String, FormatError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.records {
            w.serialize(row)?;
        }
        if self.records.is_empty() {
            w.write_record(["pattern-bits", "norm", "three_of_four", "tro_closed"])?;
        }
        let mut out = String::from_utf8(w.into_inner().map_err(|e| csv::Error::from(e.into_error()))?)
            .expect("csv output is UTF-8");
        let s = &self.summary;
        let norms: Vec<String> = s.distinct_norms.iter().map(f64::to_string).collect();
        writeln!(out, "# rows={}", s.rows).unwrap();
        writeln!(out, "# cols={}", s.cols).unwrap();
        writeln!(out, "# patterns={}", s.patterns).unwrap();
        writeln!(out, "# tol={}", s.tol).unwrap();
        writeln!(out, "# max_norm={}", s.max_norm).unwrap();
        writeln!(out, "# gap_empty={}", s.gap_empty).unwrap();
        writeln!(out, "# equivalence_holds={}", s.equivalence_holds).unwrap();
        writeln!(out, "# structure_consistent={}", s.structure_consistent).unwrap();
        writeln!(out, "# all_converged={}", s.all_converged).unwrap();
        writeln!(out, "# distinct_norms={}", norms.join(";")).unwrap();
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Self, FormatError> {
        let mut summary_fields = BTreeMap::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix("# ") {
                if let Some((k, v)) = rest.split_once('=') {
                    summary_fields.insert(k.to_string(), v.to_string());
                }
            }
        }
        fn get<T: std::str::FromStr>(m: &BTreeMap<String, String>, key: &'static str) -> Result<T, FormatError> {
            m.get(key)
                .ok_or_else(|| FormatError::Field {
                    field: key,
                    message: "missing summary line".into(),
                })?
                .parse()
                .map_err(|_| FormatError::Field {
                    field: key,
                    message: "unparsable value".into(),
                })
        }
        let norms_text: String = get(&summary_fields, "distinct_norms")?;
        let distinct_norms = norms_text
            .split(';')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse().map_err(|_| FormatError::Field {
                    field: "distinct_norms",
                    message: format!("bad value {s:?}"),
                })
            })
            .collect::<Result<_, _>>()?;
        let summary = ScanSummary {
            rows: get(&summary_fields, "rows")?,
            cols: get(&summary_fields, "cols")?,
            patterns: get(&summary_fields, "patterns")?,
            tol: get(&summary_fields, "tol")?,
            max_norm: get(&summary_fields, "max_norm")?,
            gap_empty: get(&summary_fields, "gap_empty")?,
            equivalence_holds: get(&summary_fields, "equivalence_holds")?,
            structure_consistent: get(&summary_fields, "structure_consistent")?,
            all_converged: get(&summary_fields, "all_converged")?,
            distinct_norms,
        };
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(text.as_bytes());
        let records = reader.deserialize().collect::<Result<Vec<ScanRow>, _>>()?;
        Ok(Self { summary, records })
    }
}
