//! Command-line front end.
//!
//! Exit codes: 0 success, 1 bad input, 2 SDP did not converge (report still
//! written), 3 property failure with a witness, 4 scan budget exceeded.

use std::io::Write;
use std::path::{Path, PathBuf};

use bimod_core::multiplier::{
    haagerup_norm_with, MultiplierError, ScanMode, ScanOptions, SdpOptions, SearchOptions, DEFAULT_SEED,
};
use bimod_core::normalizer::{
    composition_symbol, diagonal_part, toeplitz_average, NormalizerError, NormalizerMatrix, DEFAULT_NORMALIZER_TOL,
};
use bimod_core::pattern::{decompose_rectangles, tro_closure, PatternError};
use bimod_core::symbol::{apply_to_kernel, support_of_symbol, DEFAULT_SUPPORT_TOL};
use clap::{Parser, Subcommand, ValueEnum};

use crate::formats::{
    read, read_matrix, read_pattern, render, DiagonalDoc, FormatError, MatrixDoc, NormReportDoc, NormalizerDoc,
    PartitionDoc, PatternDoc, SymbolSource, WitnessDoc,
};
use crate::scan::{parallel_gap_scan, ScanTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_CONVERGENCE: i32 = 2;
pub const EXIT_PROPERTY: i32 = 3;
pub const EXIT_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "bimod",
    version,
    about = "Schur multiplier norms, idempotent patterns and bimodule symbols"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Tolerance (SDP gap for `norm`, classification for `scan`, zero
    /// threshold for `symbol-support`, `normalizer-check`, `diagonal-part`).
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Seed for randomized searches and sampled scans.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Worker threads for `scan`.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
    /// Output file; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Output format; `csv` is only available for `scan`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Scan this many random patterns instead of enumerating all of them.
    #[arg(long, global = true)]
    pub sample: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Schur multiplier norm of a matrix via the Haagerup factorization SDP.
    Norm {
        matrix: PathBuf,
        /// Restarts of the unitary lower-bound search.
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 50_000)]
        max_iterations: usize,
    },
    /// Rectangle decomposition of a 3-of-4 pattern.
    Decompose {
        pattern: PathBuf,
        /// Write the triple-product closure instead.
        #[arg(long)]
        closure: bool,
    },
    /// Closure of a pattern under (i,j), (k,j), (k,n) => (i,n).
    Closure { pattern: PathBuf },
    /// Norms of all idempotent multipliers on a rows x cols grid.
    Scan { rows: usize, cols: usize },
    /// Multiply a kernel by a symbol.
    SymbolApply { symbol: PathBuf, kernel: PathBuf },
    /// Support of a symbol.
    SymbolSupport { symbol: PathBuf },
    /// Check the one-entry-per-row-and-column condition and report the polar factors.
    NormalizerCheck { matrix: PathBuf },
    /// Diagonal D with A ∘ T = D T, or the composition symbol k(i) = a_{i,h(i)} with --map.
    DiagonalPart {
        multiplier: PathBuf,
        normalizer: Option<PathBuf>,
        /// Index map h as a comma-separated list.
        #[arg(long, value_delimiter = ',', conflicts_with = "normalizer")]
        map: Option<Vec<usize>>,
    },
    /// Replace each diagonal by its mean.
    ToeplitzAverage { matrix: PathBuf },
}

/// Validated job settings shared by all subcommands.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub tol: Option<f64>,
    pub seed: u64,
    pub workers: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub sample: Option<usize>,
}

impl JobConfig {
    fn from_cli(cli: &Cli) -> Result<Self, String> {
        if let Some(t) = cli.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(format!("--tol must be positive, got {t}"));
            }
        }
        if cli.workers == 0 {
            return Err("--workers must be at least 1".into());
        }
        let is_scan = matches!(cli.command, Command::Scan { .. });
        let format = cli.format.unwrap_or(if is_scan { Format::Csv } else { Format::Json });
        if format == Format::Csv && !is_scan {
            return Err("--format csv is only supported by `scan`".into());
        }
        Ok(Self {
            tol: cli.tol,
            seed: cli.seed,
            workers: cli.workers,
            out: cli.out.clone(),
            format,
            sample: cli.sample,
        })
    }

    fn tol_or(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

struct Outcome {
    code: i32,
    document: String,
    message: Option<String>,
}

impl Outcome {
    fn ok(document: String) -> Self {
        Self {
            code: EXIT_OK,
            document,
            message: None,
        }
    }
}

fn input_error(path: &Path, e: FormatError) -> String {
    format!("{}: {e}", path.display())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    let config = match JobConfig::from_cli(&cli) {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    let outcome = match execute(&cli.command, &config) {
        Ok(o) => o,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_INPUT;
        }
    };
    if let Some(msg) = &outcome.message {
        let _ = writeln!(stderr, "{msg}");
    }
    let written = match &config.out {
        Some(path) => std::fs::write(path, &outcome.document).map_err(|e| format!("{}: {e}", path.display())),
        None => stdout.write_all(outcome.document.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(msg) = written {
        let _ = writeln!(stderr, "error: {msg}");
        return EXIT_INPUT;
    }
    outcome.code
}

fn execute(command: &Command, config: &JobConfig) -> Result<Outcome, String> {
    match command {
        Command::Norm {
            matrix,
            restarts,
            max_iterations,
        } => cmd_norm(matrix, *restarts, *max_iterations, config),
        Command::Decompose { pattern, closure } => cmd_decompose(pattern, *closure),
        Command::Closure { pattern } => cmd_decompose(pattern, true),
        Command::Scan { rows, cols } => cmd_scan(*rows, *cols, config),
        Command::SymbolApply { symbol, kernel } => {
            let (_, phi) = read::<SymbolSource>(symbol)
                .and_then(|s| s.to_symbol())
                .map_err(|e| input_error(symbol, e))?;
            let k = read_matrix(kernel).map_err(|e| input_error(kernel, e))?;
            let out = apply_to_kernel(&phi, &k).map_err(|e| format!("{}: {e}", kernel.display()))?;
            Ok(Outcome::ok(render(&MatrixDoc::from(&out))))
        }
        Command::SymbolSupport { symbol } => {
            let (_, phi) = read::<SymbolSource>(symbol)
                .and_then(|s| s.to_symbol())
                .map_err(|e| input_error(symbol, e))?;
            let support = support_of_symbol(&phi, config.tol_or(DEFAULT_SUPPORT_TOL));
            Ok(Outcome::ok(render(&PatternDoc::from(&support))))
        }
        Command::NormalizerCheck { matrix } => {
            let m = read_matrix(matrix).map_err(|e| input_error(matrix, e))?;
            match NormalizerMatrix::new(m, config.tol_or(DEFAULT_NORMALIZER_TOL)) {
                Ok(t) => Ok(Outcome::ok(render(&NormalizerDoc::from(&t)))),
                Err(NormalizerError::Linalg(e)) => Err(format!("{}: {e}", matrix.display())),
                Err(conflict) => Ok(Outcome {
                    code: EXIT_PROPERTY,
                    document: render(&NormalizerDoc {
                        is_normalizer: false,
                        conflict: Some(conflict.to_string()),
                        pattern: None,
                        polar_isometry: None,
                        modulus: None,
                    }),
                    message: Some(format!("not a normalizer: {conflict}")),
                }),
            }
        }
        Command::DiagonalPart {
            multiplier,
            normalizer,
            map,
        } => cmd_diagonal_part(multiplier, normalizer.as_deref(), map.as_deref(), config),
        Command::ToeplitzAverage { matrix } => {
            let m = read_matrix(matrix).map_err(|e| input_error(matrix, e))?;
            let avg = toeplitz_average(&m).map_err(|e| format!("{}: {e}", matrix.display()))?;
            Ok(Outcome::ok(render(&MatrixDoc::from(&avg))))
        }
    }
}

fn cmd_norm(path: &Path, restarts: usize, max_iterations: usize, config: &JobConfig) -> Result<Outcome, String> {
    let a = read_matrix(path).map_err(|e| input_error(path, e))?;
    let opts = SdpOptions {
        tol: config.tol_or(SdpOptions::default().tol),
        max_iterations,
        search: Some(SearchOptions {
            seed: config.seed,
            restarts,
            ..SearchOptions::default()
        }),
        ..SdpOptions::default()
    };
    match haagerup_norm_with(&a, &opts) {
        Ok(report) => Ok(Outcome::ok(render(&NormReportDoc::from(&report)))),
        Err(MultiplierError::NoConvergence(report)) => Ok(Outcome {
            code: EXIT_NO_CONVERGENCE,
            document: render(&NormReportDoc::from(report.as_ref())),
            message: Some(format!(
                "warning: no convergence after {} iterations (gap {:e})",
                report.iterations,
                report.gap()
            )),
        }),
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

fn cmd_decompose(path: &Path, closure: bool) -> Result<Outcome, String> {
    let e = read_pattern(path).map_err(|err| input_error(path, err))?;
    if closure {
        return Ok(Outcome::ok(render(&PatternDoc::from(&tro_closure(&e)))));
    }
    match decompose_rectangles(&e) {
        Ok(p) => Ok(Outcome::ok(render(&PartitionDoc::from(&p)))),
        Err(PatternError::NotThreeOfFour(q)) => Ok(Outcome {
            code: EXIT_PROPERTY,
            document: render(&WitnessDoc::from(q)),
            message: Some(format!("pattern fails the 3-of-4 property at {q}")),
        }),
        Err(other) => Err(format!("{}: {other}", path.display())),
    }
}

fn cmd_scan(rows: usize, cols: usize, config: &JobConfig) -> Result<Outcome, String> {
    let mode = match config.sample {
        Some(count) => ScanMode::Sampled {
            count,
            seed: config.seed,
        },
        None => ScanMode::Exhaustive,
    };
    let opts = ScanOptions {
        mode,
        tol: config.tol_or(ScanOptions::default().tol),
        ..ScanOptions::default()
    };
    if rows == 0 || cols == 0 {
        return Err(format!("grid must be at least 1x1, got {rows}x{cols}"));
    }
    let report = match parallel_gap_scan(rows, cols, &opts, config.workers) {
        Ok(r) => r,
        Err(e @ MultiplierError::BudgetExceeded { .. }) => {
            return Ok(Outcome {
                code: EXIT_BUDGET,
                document: String::new(),
                message: Some(format!("error: {e}; pass --sample N to scan random patterns")),
            })
        }
        Err(e) => return Err(e.to_string()),
    };
    let table = ScanTable::from(&report);
    let document = match config.format {
        Format::Csv => table.to_csv().map_err(|e| e.to_string())?,
        Format::Json => render(&table),
    };
    let verdict = if report.gap_empty {
        format!(
            "gap (1, 2/sqrt(3)) empty over {} patterns; max norm {}",
            report.records.len(),
            report.max_norm()
        )
    } else {
        format!("gap NOT empty: {} offending patterns", report.violations.len())
    };
    let mut message = verdict;
    if !report.equivalence_holds || !report.structure_consistent {
        message.push_str("; norm/3-of-4 equivalence or structure check failed");
    }
    Ok(Outcome {
        code: if report.gap_empty { EXIT_OK } else { EXIT_PROPERTY },
        document,
        message: Some(message),
    })
}

fn cmd_diagonal_part(
    multiplier: &Path,
    normalizer: Option<&Path>,
    map: Option<&[usize]>,
    config: &JobConfig,
) -> Result<Outcome, String> {
    let a = read_matrix(multiplier).map_err(|e| input_error(multiplier, e))?;
    if let Some(h) = map {
        let k = composition_symbol(&a, h).map_err(|e| format!("--map: {e}"))?;
        return Ok(Outcome::ok(render(&DiagonalDoc::new(&k))));
    }
    let Some(t_path) = normalizer else {
        return Err("diagonal-part needs a normalizer file or --map".into());
    };
    let t = read_matrix(t_path).map_err(|e| input_error(t_path, e))?;
    let t = match NormalizerMatrix::new(t, config.tol_or(DEFAULT_NORMALIZER_TOL)) {
        Ok(t) => t,
        Err(NormalizerError::Linalg(e)) => return Err(format!("{}: {e}", t_path.display())),
        Err(conflict) => {
            return Ok(Outcome {
                code: EXIT_PROPERTY,
                document: String::new(),
                message: Some(format!("error: {}: not a normalizer: {conflict}", t_path.display())),
            })
        }
    };
    let d = diagonal_part(&a, &t).map_err(|e| format!("{}: {e}", multiplier.display()))?;
    Ok(Outcome::ok(render(&DiagonalDoc::new(&d.diagonal()))))
}
