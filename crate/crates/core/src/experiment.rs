//! Batch experiments: many seeded instances per (class, dimension) cell,
//! analyzed independently and summarized with Wald confidence intervals.
//!
//! Output layout under `output_dir`:
//!
//! ```text
//! <class>/n<NN>/i<II>/instance.dat
//! <class>/n<NN>/i<II>/metrics.json
//! <class>/n<NN>/i<II>/strength_vs_indegree.csv
//! <class>/n<NN>/i<II>/disparity_vs_outdegree.csv
//! <class>/n<NN>/i<II>/lon.csv            (only with write_edges)
//! <class>/n<NN>/i<II>/done               (completion marker)
//! metrics.csv                            (one row per instance)
//! aggregate.csv                          (one row per class, n, metric)
//! batch.log                              (timestamped progress)
//! ```

use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::{write_atomic, write_instance};
use crate::generate::{GeneratorConfig, GeneratorParams, GeneratorRegistry, REAL_LIKE, UNIFORM};
use crate::metrics::{analyze, write_degree_table, MetricsReport, SCHEMA_VERSION};
use crate::stats::wald_ci;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BatchConfig {
    pub dimensions: Vec<usize>,
    pub instances_per_cell: usize,
    pub classes: Vec<String>,
    pub base_seed: u64,
    pub output_dir: PathBuf,
    /// Worker threads; 0 uses every available core.
    pub workers: usize,
    pub eps: f64,
    /// Also write each LON as a CSV edge list.
    pub write_edges: bool,
    pub params: GeneratorParams,
}

impl Default for BatchConfig {
    fn default() -> Self {
        BatchConfig {
            dimensions: (5..=10).collect(),
            instances_per_cell: 30,
            classes: vec![UNIFORM.to_string(), REAL_LIKE.to_string()],
            base_seed: 0,
            output_dir: PathBuf::from("out"),
            workers: 0,
            eps: 0.05,
            write_edges: false,
            params: GeneratorParams::default(),
        }
    }
}

impl BatchConfig {
    /// Parses a TOML file of `key = value` lines; missing keys keep their defaults.
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: BatchConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimensions.is_empty() {
            return Err(Error::Config("dimensions must not be empty".into()));
        }
        if let Some(&n) = self.dimensions.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("dimension {n} is below 2")));
        }
        if self.instances_per_cell < 1 {
            return Err(Error::Config("instances_per_cell must be at least 1".into()));
        }
        if self.classes.is_empty() {
            return Err(Error::Config("classes must not be empty".into()));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::Config(format!("eps must be non-negative, got {}", self.eps)));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable per-cell seed; every cell can be regenerated on its own.
pub fn cell_seed(base_seed: u64, class: &str, n: usize, index: usize) -> u64 {
    let mut h = splitmix64(base_seed);
    for b in class.bytes() {
        h = splitmix64(h ^ u64::from(b));
    }
    h = splitmix64(h ^ n as u64);
    splitmix64(h ^ index as u64)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub class: String,
    pub n: usize,
    pub index: usize,
    pub seed: u64,
}

impl Cell {
    pub fn dir(&self, root: &Path) -> PathBuf {
        root.join(&self.class)
            .join(format!("n{:02}", self.n))
            .join(format!("i{:02}", self.index))
    }
}

pub fn cells(cfg: &BatchConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    for class in &cfg.classes {
        for &n in &cfg.dimensions {
            for index in 0..cfg.instances_per_cell {
                out.push(Cell {
                    class: class.clone(),
                    n,
                    index,
                    seed: cell_seed(cfg.base_seed, class, n, index),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub enum CellStatus {
    Done(Box<MetricsReport>),
    /// Skipped by the enumeration guard.
    Skipped(String),
    Failed(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub cell: Cell,
    pub status: CellStatus,
    /// Loaded from a previous run's completion marker.
    pub resumed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub schema_version: u32,
    pub class: String,
    pub n: usize,
    pub metric: String,
    pub mean: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub sample_count: usize,
    pub undefined_count: usize,
}

#[derive(Debug, Clone)]
pub struct BatchOutcome {
    pub results: Vec<CellResult>,
    pub aggregate: Vec<AggregateRow>,
}

impl BatchOutcome {
    pub fn failures(&self) -> impl Iterator<Item = &CellResult> {
        self.results
            .iter()
            .filter(|r| !matches!(r.status, CellStatus::Done(_)))
    }

    pub fn reports(&self) -> impl Iterator<Item = &MetricsReport> {
        self.results.iter().filter_map(|r| match &r.status {
            CellStatus::Done(report) => Some(report.as_ref()),
            _ => None,
        })
    }

    pub fn row(&self, class: &str, n: usize, metric: &str) -> Option<&AggregateRow> {
        self.aggregate
            .iter()
            .find(|r| r.class == class && r.n == n && r.metric == metric)
    }
}

struct Log {
    path: PathBuf,
}

impl Log {
    fn line(&self, msg: &str) {
        let ts = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs_f64())
            .unwrap_or(0.0);
        if let Ok(mut f) = OpenOptions::new().create(true).append(true).open(&self.path) {
            let _ = writeln!(f, "[{ts:.3}] {msg}");
        }
    }
}

/// Runs (or resumes) every cell, then writes `metrics.csv` and `aggregate.csv`.
pub fn run_batch(cfg: &BatchConfig, registry: &GeneratorRegistry) -> Result<BatchOutcome> {
    cfg.validate()?;
    for class in &cfg.classes {
        registry.get(class)?;
    }
    let root = cfg.output_dir.as_path();
    std::fs::create_dir_all(root).map_err(|e| Error::file(root, e))?;
    let log = Log {
        path: root.join("batch.log"),
    };
    log.line(&format!("batch start: {} cells", cells(cfg).len()));

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    let results: Vec<CellResult> = pool.install(|| {
        cells(cfg)
            .into_par_iter()
            .map(|cell| {
                let result = run_cell(cfg, registry, cell);
                let status = match &result.status {
                    CellStatus::Done(_) if result.resumed => "resumed".to_string(),
                    CellStatus::Done(_) => "done".to_string(),
                    CellStatus::Skipped(why) => format!("skipped: {why}"),
                    CellStatus::Failed(why) => format!("failed: {why}"),
                };
                log.line(&format!(
                    "{} n={} i={} seed={} {status}",
                    result.cell.class, result.cell.n, result.cell.index, result.cell.seed
                ));
                result
            })
            .collect()
    });

    let aggregate = aggregate(cfg, &results);
    let outcome = BatchOutcome { results, aggregate };

    let mut buf = Vec::new();
    MetricsReport::write_csv(&mut buf, outcome.reports())?;
    write_atomic(&root.join("metrics.csv"), &buf)?;
    write_atomic(&root.join("aggregate.csv"), &aggregate_csv(&outcome.aggregate)?)?;
    log.line(&format!("batch end: {} failed cells", outcome.failures().count()));
    Ok(outcome)
}

fn run_cell(cfg: &BatchConfig, registry: &GeneratorRegistry, cell: Cell) -> CellResult {
    let dir = cell.dir(&cfg.output_dir);
    if let Some(report) = load_completed(&dir) {
        return CellResult {
            cell,
            status: CellStatus::Done(Box::new(report)),
            resumed: true,
        };
    }
    let status = match analyze_cell(cfg, registry, &cell, &dir) {
        Ok(report) => CellStatus::Done(Box::new(report)),
        Err(Error::ResourceLimit(why)) => {
            let _ = write_atomic(&dir.join("skipped.txt"), format!("{why}\n").as_bytes());
            CellStatus::Skipped(why)
        }
        Err(e) => CellStatus::Failed(e.to_string()),
    };
    CellResult {
        cell,
        status,
        resumed: false,
    }
}

fn load_completed(dir: &Path) -> Option<MetricsReport> {
    if !dir.join("done").exists() {
        return None;
    }
    let text = std::fs::read_to_string(dir.join("metrics.json")).ok()?;
    MetricsReport::from_json(&text).ok()
}

fn analyze_cell(cfg: &BatchConfig, registry: &GeneratorRegistry, cell: &Cell, dir: &Path) -> Result<MetricsReport> {
    let gen_cfg = GeneratorConfig::new(cell.class.clone(), cell.n, cell.seed).with_params(cfg.params.clone());
    let inst = registry.generate(&gen_cfg)?;
    write_instance(dir.join("instance.dat"), &inst)?;

    let (_, lon, report) = analyze(&inst, cfg.eps)?;
    write_report_files(dir, &report)?;
    if cfg.write_edges {
        write_atomic(&dir.join("lon.csv"), lon.export_edges().as_bytes())?;
    }
    write_atomic(&dir.join("done"), b"")?;
    Ok(report)
}

/// Writes `metrics.json` and the two degree tables into `dir`.
pub fn write_report_files(dir: &Path, report: &MetricsReport) -> Result<()> {
    write_atomic(&dir.join("metrics.json"), report.to_json().as_bytes())?;
    let mut buf = Vec::new();
    write_degree_table(&mut buf, &report.strength_vs_indegree)?;
    write_atomic(&dir.join("strength_vs_indegree.csv"), &buf)?;
    buf.clear();
    write_degree_table(&mut buf, &report.disparity_vs_outdegree)?;
    write_atomic(&dir.join("disparity_vs_outdegree.csv"), &buf)?;
    Ok(())
}

/// One row per (class, n, metric), averaging over instances with a defined value.
pub fn aggregate(cfg: &BatchConfig, results: &[CellResult]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    for class in &cfg.classes {
        for &n in &cfg.dimensions {
            let reports: Vec<&MetricsReport> = results
                .iter()
                .filter(|r| r.cell.class == *class && r.cell.n == n)
                .filter_map(|r| match &r.status {
                    CellStatus::Done(report) => Some(report.as_ref()),
                    _ => None,
                })
                .collect();
            let Some(first) = reports.first() else {
                continue;
            };
            let names: Vec<&str> = first.numeric_fields().into_iter().map(|(k, _)| k).collect();
            let table: Vec<Vec<(&str, Option<f64>)>> = reports.iter().map(|r| r.numeric_fields()).collect();
            for (col, name) in names.iter().enumerate() {
                let samples: Vec<f64> = table.iter().filter_map(|fields| fields[col].1).collect();
                let ci = wald_ci(&samples);
                rows.push(AggregateRow {
                    schema_version: SCHEMA_VERSION,
                    class: class.clone(),
                    n,
                    metric: name.to_string(),
                    mean: ci.map(|c| c.mean),
                    ci_low: ci.map(|c| c.low),
                    ci_high: ci.map(|c| c.high),
                    sample_count: samples.len(),
                    undefined_count: cfg.instances_per_cell - samples.len(),
                });
            }
        }
    }
    rows
}

pub fn aggregate_csv(rows: &[AggregateRow]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    writer
        .into_inner()
        .map_err(|e| Error::Io(e.into_error()))
}

pub fn read_aggregate_csv(text: &str) -> Result<Vec<AggregateRow>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    Ok(reader.deserialize().collect::<std::result::Result<Vec<_>, _>>()?)
}
