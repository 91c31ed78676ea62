//! Executes a config and writes the points CSV, edges CSV and report.

use std::fs;
use std::path::{Path, PathBuf};

use latembed::optimizer::optimize;
use latembed::{embed, OptimizationReport, Termination};
use serde::Serialize;
use thiserror::Error;

use crate::config::{Diagnostic, RunConfig};

#[derive(Debug, Default, Clone)]
pub struct RunOptions {
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Replaces the config's output directory.
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid config:\n{}", render(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("writing {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("optimization failed: {0}")]
    Solver(#[from] latembed::Error),
    #[error("cannot build a pool of {threads} worker threads: {message}")]
    Threads { threads: usize, message: String },
}

fn render(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| format!("  {d}"))
        .collect::<Vec<_>>()
        .join("\n")
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Invalid(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub termination: Termination,
    pub iterations: usize,
    pub points_csv: PathBuf,
    pub edges_csv: PathBuf,
    pub report: PathBuf,
}

impl RunSummary {
    pub fn exit_code(&self) -> i32 {
        match self.termination {
            Termination::Converged => 0,
            _ => 3,
        }
    }
}

#[derive(Serialize)]
struct ReportFile<'a> {
    seed: u64,
    #[serde(flatten)]
    report: &'a OptimizationReport,
}

fn io_err(context: impl Into<String>) -> impl FnOnce(std::io::Error) -> RunError {
    let context = context.into();
    move |source| RunError::Io { context, source }
}

pub fn run(config_path: &Path, options: &RunOptions) -> Result<RunSummary, RunError> {
    let source = fs::read_to_string(config_path)
        .map_err(io_err(format!("reading {}", config_path.display())))?;
    let config = RunConfig::from_toml(&source).map_err(RunError::Invalid)?;
    let base = config_path.parent().unwrap_or(Path::new("."));
    let dir = options
        .output_dir
        .clone()
        .unwrap_or_else(|| base.join(&config.output.dir));
    run_config(&config, &source, &dir, options.threads)
}

/// Runs an already parsed config, writing into `dir`.
pub fn run_config(
    config: &RunConfig,
    source: &str,
    dir: &Path,
    threads: Option<usize>,
) -> Result<RunSummary, RunError> {
    let prepared = config.prepare(source).map_err(RunError::Invalid)?;
    let solve = || {
        optimize(
            &prepared.lattice,
            &prepared.manifold,
            &prepared.fields,
            &prepared.params,
            &prepared.stop,
            &prepared.control,
        )
    };
    let (_, report) = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| RunError::Threads {
                threads: n,
                message: e.to_string(),
            })?
            .install(solve)?,
        None => solve()?,
    };
    log::info!(
        "{} after {} iterations",
        report.termination.as_str(),
        report.iterations
    );

    fs::create_dir_all(dir).map_err(io_err(format!("creating {}", dir.display())))?;
    let summary = RunSummary {
        termination: report.termination,
        iterations: report.iterations,
        points_csv: dir.join(&config.output.points_csv),
        edges_csv: dir.join(&config.output.edges_csv),
        report: dir.join(&config.output.report),
    };
    write_points(&summary.points_csv, &report)?;
    write_edges(&summary.edges_csv, &prepared.lattice)?;
    let text = toml::to_string(&ReportFile {
        seed: config.optimizer.seed,
        report: &report,
    })
    .expect("report serializes");
    fs::write(&summary.report, text)
        .map_err(io_err(format!("writing {}", summary.report.display())))?;
    Ok(summary)
}

/// Seventeen significant digits, enough to recover every `f64` exactly.
fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn points_header(dim: usize) -> Vec<String> {
    let mut header = Vec::new();
    for prefix in ["lat", "init", "final"] {
        header.extend((1..=dim).map(|i| format!("{prefix}_{i}")));
    }
    header.extend(
        [
            "alignment",
            "reinforcement",
            "activation_penalty",
            "curvature_penalty",
            "total",
        ]
        .map(String::from),
    );
    header
}

fn write_points(path: &Path, report: &OptimizationReport) -> Result<(), RunError> {
    let csv_err = |source| RunError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    let dim = report.points.first().map_or(0, |p| p.lattice.dim());
    w.write_record(points_header(dim)).map_err(csv_err)?;
    for p in &report.points {
        let mut row: Vec<String> = p.lattice.coords().iter().map(i64::to_string).collect();
        row.extend(embed(&p.lattice).coords().iter().copied().map(float));
        row.extend(p.position.iter().copied().map(float));
        let b = &p.breakdown;
        row.extend(
            [
                b.alignment,
                b.reinforcement,
                b.activation_penalty,
                b.curvature_penalty,
                b.total,
            ]
            .map(float),
        );
        w.write_record(&row).map_err(csv_err)?;
    }
    w.flush()
        .map_err(io_err(format!("writing {}", path.display())))
}

fn write_edges(path: &Path, lattice: &latembed::Lattice) -> Result<(), RunError> {
    let csv_err = |source| RunError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
    w.write_record(["source", "target"]).map_err(csv_err)?;
    for (i, j) in lattice.adjacent_pairs() {
        w.write_record([i.to_string(), j.to_string()])
            .map_err(csv_err)?;
    }
    w.flush()
        .map_err(io_err(format!("writing {}", path.display())))
}

/// One parsed row of a points CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRow {
    pub lattice: Vec<i64>,
    pub initial: Vec<f64>,
    pub position: Vec<f64>,
    /// alignment, reinforcement, activation_penalty, curvature_penalty, total
    pub breakdown: [f64; 5],
}

pub fn read_points(path: &Path) -> anyhow::Result<Vec<PointRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let width = r.headers()?.len();
    anyhow::ensure!(
        width >= 8 && (width - 5) % 3 == 0,
        "unexpected column count {width}"
    );
    let dim = (width - 5) / 3;
    let mut rows = Vec::new();
    for record in r.records() {
        let record = record?;
        let floats = |range: std::ops::Range<usize>| -> anyhow::Result<Vec<f64>> {
            range.map(|i| Ok(record[i].parse::<f64>()?)).collect()
        };
        let lattice = (0..dim)
            .map(|i| record[i].parse::<i64>())
            .collect::<Result<_, _>>()?;
        let b = floats(3 * dim..3 * dim + 5)?;
        rows.push(PointRow {
            lattice,
            initial: floats(dim..2 * dim)?,
            position: floats(2 * dim..3 * dim)?,
            breakdown: [b[0], b[1], b[2], b[3], b[4]],
        });
    }
    Ok(rows)
}
