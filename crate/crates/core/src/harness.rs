//! Replicated Monte Carlo size and power experiments.
//!
//! An [`ExperimentConfig`] describes a grid of `(p, n)` cells, a data design
//! and the tests to run. Each replication of each cell draws fresh data from
//! its own random stream `(master_seed, cell << 32 | replication)`, computes
//! every requested statistic on that same data, and records the z-score and
//! decision. Per-replication outcomes are collected in index order and
//! reduced sequentially, so results do not depend on the number of worker
//! threads.

use crate::asymptotics::decide;
use crate::covstats::{
    classic_covariance, clrt_statistic, legacy_lw_statistic, lw_statistic, plugin_delta,
    simplified_covariance, StatisticKind,
};
use crate::datagen::{
    two_point_delta, CovarianceKind, CovarianceSpec, EntryDistribution, RngStream, Synthesizer,
    RNG_ALGORITHM,
};
use crate::error::{Error, Result};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::{Read, Write};
use std::path::Path;

/// Which `Δ` the tests are told.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeltaPolicy {
    /// The generator's analytic `Δ`.
    #[default]
    Known,
    /// Always `Δ = 0`, i.e. pretend the data are Gaussian.
    AssumeZero,
    /// The heuristic moment estimate from each replication's data.
    PlugIn,
}

/// A grid cell given either by dimensions or by ratio and sample size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridPoint {
    Dims { p: usize, n: usize },
    Ratio { y: f64, n: usize },
}

impl GridPoint {
    /// `(p, n)`; a ratio cell uses `p = round(y·n)`.
    pub fn resolve(&self) -> Result<(usize, usize)> {
        let (p, n) = match *self {
            GridPoint::Dims { p, n } => (p, n),
            GridPoint::Ratio { y, n } => {
                if !(y > 0.0 && y.is_finite()) {
                    return Err(Error::Config(format!("grid ratio must be positive, got {y}")));
                }
                ((y * n as f64).round() as usize, n)
            }
        };
        if p == 0 || n < 2 {
            return Err(Error::Config(format!("grid cell needs p ≥ 1 and n ≥ 2, got p = {p}, n = {n}")));
        }
        Ok((p, n))
    }
}

/// Population mean `μ`: a constant broadcast to every coordinate or an
/// explicit vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeanSpec {
    Constant(f64),
    Vector(Vec<f64>),
}

impl Default for MeanSpec {
    fn default() -> Self {
        MeanSpec::Constant(0.0)
    }
}

impl MeanSpec {
    pub fn resolve(&self, p: usize) -> Result<Vec<f64>> {
        match self {
            MeanSpec::Constant(c) => Ok(vec![*c; p]),
            MeanSpec::Vector(v) if v.len() == p => Ok(v.clone()),
            MeanSpec::Vector(v) => Err(Error::Config(format!(
                "mu has length {} but the grid cell has p = {p}",
                v.len()
            ))),
        }
    }
}

fn default_alpha() -> f64 {
    0.05
}

fn default_covariance() -> CovarianceKind {
    CovarianceKind::Identity
}

/// Full description of a replicated simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    pub tests: Vec<StatisticKind>,
    pub distribution: EntryDistribution,
    #[serde(default = "default_covariance")]
    pub covariance: CovarianceKind,
    #[serde(default)]
    pub mu: MeanSpec,
    pub grid: Vec<GridPoint>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub replications: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub delta_policy: DeltaPolicy,
    /// When set, `distribution` is replaced by `TwoPoint(γ)` for each listed
    /// `γ` and every grid cell is run once per `γ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep_gammas: Option<Vec<f64>>,
}

/// Smallest replication count accepted by [`ExperimentConfig::validate`].
pub const MIN_REPLICATIONS: usize = 100;

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.tests.is_empty() {
            return Err(Error::Config("tests: at least one test kind is required".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!("alpha: must lie in (0, 1), got {}", self.alpha)));
        }
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::Config(format!(
                "replications: need at least {MIN_REPLICATIONS}, got {}",
                self.replications
            )));
        }
        if self.grid.is_empty() {
            return Err(Error::Config("grid: at least one cell is required".into()));
        }
        self.distribution
            .validate()
            .map_err(|e| Error::Config(format!("distribution: {e}")))?;
        if let Some(gammas) = &self.sweep_gammas {
            if gammas.is_empty() {
                return Err(Error::Config("sweep_gammas: list is empty".into()));
            }
            for &g in gammas {
                two_point_delta(g).map_err(|e| Error::Config(format!("sweep_gammas: {e}")))?;
            }
        }
        for (i, cell) in self.grid.iter().enumerate() {
            let (p, n) = cell
                .resolve()
                .map_err(|e| Error::Config(format!("grid[{i}]: {e}")))?;
            for &kind in &self.tests {
                if kind.is_clrt() && p >= n {
                    return Err(Error::Config(format!(
                        "grid[{i}]: {kind} requires p < n, got p = {p}, n = {n}"
                    )));
                }
                if !kind.is_clrt() && n < 3 {
                    return Err(Error::Config(format!("grid[{i}]: {kind} requires n ≥ 3")));
                }
            }
            self.mu.resolve(p).map_err(|e| Error::Config(format!("grid[{i}]: {e}")))?;
            crate::datagen::make_covariance(&CovarianceSpec::new(self.covariance.clone(), p))
                .map_err(|e| Error::Config(format!("grid[{i}]: covariance: {e}")))?;
        }
        Ok(())
    }

    /// First 16 hex digits of the SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serialises");
        let digest = Sha256::digest(json.as_bytes());
        hex::encode(digest)[..16].to_string()
    }
}

/// Aggregate for one `(cell, test)` pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellResult {
    pub test: StatisticKind,
    pub p: usize,
    pub n: usize,
    pub y_n: f64,
    pub dist: String,
    pub cov: String,
    /// `Δ` supplied to the test (averaged over replications under
    /// [`DeltaPolicy::PlugIn`]).
    pub delta: f64,
    pub alpha: f64,
    pub replications: usize,
    pub rejections: usize,
    pub rate: f64,
    /// `sqrt(r(1 − r)/R)`.
    pub mc_se: f64,
    pub z_mean: f64,
    pub z_var: f64,
    pub seed: u64,
    pub config_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub master_seed: u64,
    pub rng: String,
    /// Seconds since the Unix epoch when the run finished.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: String,
    pub cells: Vec<CellResult>,
    pub provenance: Provenance,
}

impl ExperimentResult {
    pub fn find(&self, test: StatisticKind, p: usize, n: usize) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.test == test && c.p == p && c.n == n)
    }
}

struct Cell {
    p: usize,
    n: usize,
    dist: EntryDistribution,
}

/// One replication: `(z, reject)` per requested test plus the `Δ` used.
struct Outcome {
    z: Vec<f64>,
    reject: Vec<bool>,
    delta: f64,
}

fn thread_pool(jobs: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

fn replicate(cfg: &ExperimentConfig, cell_index: usize, cell: &Cell, synth: &Synthesizer, mu: &[f64], rep: usize) -> Result<Outcome> {
    let stream = RngStream::new(cfg.master_seed, ((cell_index as u64) << 32) | rep as u64);
    let x = synth.generate(cell.n, &mut stream.rng())?;
    let delta = match cfg.delta_policy {
        DeltaPolicy::Known => cell.dist.delta(),
        DeltaPolicy::AssumeZero => 0.0,
        DeltaPolicy::PlugIn => plugin_delta(&x),
    };
    let needs_classic = cfg.tests.iter().any(|k| *k != StatisticKind::LegacyClrt);
    let s = needs_classic.then(|| classic_covariance(&x));
    let mut out = Outcome {
        z: Vec::with_capacity(cfg.tests.len()),
        reject: Vec::with_capacity(cfg.tests.len()),
        delta,
    };
    for &kind in &cfg.tests {
        let stat = match kind {
            StatisticKind::NewClrt => clrt_statistic(s.as_ref().expect("classic estimate"))?,
            StatisticKind::NewLw => lw_statistic(s.as_ref().expect("classic estimate"), delta)?,
            StatisticKind::LegacyLw => legacy_lw_statistic(s.as_ref().expect("classic estimate"))?,
            StatisticKind::LegacyClrt => clrt_statistic(&simplified_covariance(&x, mu)?)?,
        };
        let report = decide(stat, cfg.alpha, delta)?;
        out.z.push(report.z_score);
        out.reject.push(report.reject);
    }
    Ok(out)
}

fn run_cells(cfg: &ExperimentConfig, cells: &[Cell], jobs: usize) -> Result<ExperimentResult> {
    cfg.validate()?;
    if cfg.delta_policy == DeltaPolicy::PlugIn {
        log::warn!("delta_policy = plug-in uses a heuristic moment estimate of Δ");
    }
    let pool = thread_pool(jobs)?;
    let hash = cfg.hash();
    let mut results = Vec::with_capacity(cells.len() * cfg.tests.len());
    for (ci, cell) in cells.iter().enumerate() {
        let cov = CovarianceSpec::new(cfg.covariance.clone(), cell.p);
        let mu = cfg.mu.resolve(cell.p)?;
        let synth = Synthesizer::new(cell.dist, &cov, &mu)?;
        log::info!(
            "cell {}/{}: p = {}, n = {}, dist = {}, R = {}",
            ci + 1,
            cells.len(),
            cell.p,
            cell.n,
            cell.dist,
            cfg.replications
        );
        let outcomes: Vec<Outcome> = pool.install(|| {
            (0..cfg.replications)
                .into_par_iter()
                .map(|rep| {
                    replicate(cfg, ci, cell, &synth, &mu, rep).map_err(|e| Error::Replication {
                        p: cell.p,
                        n: cell.n,
                        replication: rep,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let r = cfg.replications as f64;
        let delta_mean = outcomes.iter().map(|o| o.delta).sum::<f64>() / r;
        for (ti, &test) in cfg.tests.iter().enumerate() {
            let rejections = outcomes.iter().filter(|o| o.reject[ti]).count();
            let z_mean = outcomes.iter().map(|o| o.z[ti]).sum::<f64>() / r;
            let z_var = outcomes.iter().map(|o| (o.z[ti] - z_mean).powi(2)).sum::<f64>() / (r - 1.0);
            let rate = rejections as f64 / r;
            let delta = match test {
                StatisticKind::NewClrt | StatisticKind::NewLw => delta_mean,
                StatisticKind::LegacyClrt | StatisticKind::LegacyLw => 0.0,
            };
            results.push(CellResult {
                test,
                p: cell.p,
                n: cell.n,
                y_n: cell.p as f64 / cell.n as f64,
                dist: cell.dist.to_string(),
                cov: cfg.covariance.to_string(),
                delta,
                alpha: cfg.alpha,
                replications: cfg.replications,
                rejections,
                rate,
                mc_se: (rate * (1.0 - rate) / r).sqrt(),
                z_mean,
                z_var,
                seed: cfg.master_seed,
                config_hash: hash.clone(),
            });
        }
    }
    let timestamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Ok(ExperimentResult {
        name: cfg.name.clone(),
        cells: results,
        provenance: Provenance {
            config_hash: hash,
            master_seed: cfg.master_seed,
            rng: RNG_ALGORITHM.to_string(),
            timestamp,
        },
    })
}

fn grid_cells(cfg: &ExperimentConfig) -> Result<Vec<Cell>> {
    let dists: Vec<EntryDistribution> = match &cfg.sweep_gammas {
        Some(gammas) => gammas.iter().map(|&gamma| EntryDistribution::TwoPoint { gamma }).collect(),
        None => vec![cfg.distribution],
    };
    let mut cells = Vec::new();
    for dist in dists {
        for point in &cfg.grid {
            let (p, n) = point.resolve()?;
            cells.push(Cell { p, n, dist });
        }
    }
    Ok(cells)
}

/// Runs whatever the config describes: a sweep if `sweep_gammas` is set,
/// otherwise one pass over the grid. `jobs = 0` uses all cores.
pub fn run_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentResult> {
    cfg.validate()?;
    run_cells(cfg, &grid_cells(cfg)?, jobs)
}

/// Empirical sizes: requires `Σ = I`.
pub fn run_size_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentResult> {
    if cfg.covariance != CovarianceKind::Identity {
        return Err(Error::Config(format!(
            "covariance: a size experiment needs identity, got {}",
            cfg.covariance
        )));
    }
    run_experiment(cfg, jobs)
}

/// Empirical powers: requires `Σ ≠ I`.
pub fn run_power_experiment(cfg: &ExperimentConfig, jobs: usize) -> Result<ExperimentResult> {
    let is_identity = match &cfg.covariance {
        CovarianceKind::Identity => true,
        CovarianceKind::Diagonal { values } => values.iter().all(|&v| v == 1.0),
        _ => false,
    };
    if is_identity {
        return Err(Error::Config(
            "covariance: a power experiment needs an alternative to the identity".into(),
        ));
    }
    run_experiment(cfg, jobs)
}

/// One point of a `Δ` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub gamma: f64,
    pub delta: f64,
    pub rate: f64,
    pub mc_se: f64,
}

/// Size of the new LW test (with the true `Δ`) on two-point data for each
/// `γ`, at a single `(p, n)`.
pub fn sweep_delta(
    gammas: &[f64],
    p: usize,
    n: usize,
    alpha: f64,
    replications: usize,
    master_seed: u64,
    jobs: usize,
) -> Result<Vec<SweepPoint>> {
    let cfg = ExperimentConfig {
        name: "delta-sweep".into(),
        tests: vec![StatisticKind::NewLw],
        distribution: EntryDistribution::StdNormal,
        covariance: CovarianceKind::Identity,
        mu: MeanSpec::default(),
        grid: vec![GridPoint::Dims { p, n }],
        alpha,
        replications,
        master_seed,
        delta_policy: DeltaPolicy::Known,
        sweep_gammas: Some(gammas.to_vec()),
    };
    let result = run_experiment(&cfg, jobs)?;
    Ok(gammas
        .iter()
        .zip(&result.cells)
        .map(|(&gamma, c)| SweepPoint {
            gamma,
            delta: c.delta,
            rate: c.rate,
            mc_se: c.mc_se,
        })
        .collect())
}

/// Column order of the CSV export.
pub const CSV_COLUMNS: [&str; 14] = [
    "test",
    "p",
    "n",
    "y_n",
    "dist",
    "cov",
    "delta",
    "alpha",
    "replications",
    "rejections",
    "rate",
    "mc_se",
    "seed",
    "config_hash",
];

/// One CSV row; the field order matches [`CSV_COLUMNS`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub test: StatisticKind,
    pub p: usize,
    pub n: usize,
    pub y_n: f64,
    pub dist: String,
    pub cov: String,
    pub delta: f64,
    pub alpha: f64,
    pub replications: usize,
    pub rejections: usize,
    pub rate: f64,
    pub mc_se: f64,
    pub seed: u64,
    pub config_hash: String,
}

impl From<&CellResult> for CsvRow {
    fn from(c: &CellResult) -> Self {
        Self {
            test: c.test,
            p: c.p,
            n: c.n,
            y_n: c.y_n,
            dist: c.dist.clone(),
            cov: c.cov.clone(),
            delta: c.delta,
            alpha: c.alpha,
            replications: c.replications,
            rejections: c.rejections,
            rate: c.rate,
            mc_se: c.mc_se,
            seed: c.seed,
            config_hash: c.config_hash.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Jsonl,
}

pub fn write_csv<W: Write>(result: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    // Header is written explicitly so an empty result still carries it.
    w.write_record(CSV_COLUMNS)?;
    let mut w = {
        let inner = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        csv::WriterBuilder::new().has_headers(false).from_writer(inner)
    };
    for cell in &result.cells {
        w.serialize(CsvRow::from(cell))?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per cell, with the provenance fields attached.
pub fn write_jsonl<W: Write>(result: &ExperimentResult, mut out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Line<'a> {
        #[serde(flatten)]
        cell: &'a CellResult,
        rng: &'a str,
        timestamp: u64,
    }
    for cell in &result.cells {
        serde_json::to_writer(
            &mut out,
            &Line {
                cell,
                rng: &result.provenance.rng,
                timestamp: result.provenance.timestamp,
            },
        )?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn export(result: &ExperimentResult, path: impl AsRef<Path>, format: ExportFormat) -> Result<()> {
    let file = std::io::BufWriter::new(std::fs::File::create(path)?);
    match format {
        ExportFormat::Csv => write_csv(result, file),
        ExportFormat::Jsonl => write_jsonl(result, file),
    }
}

/// Parses an exported CSV, checking the header against [`CSV_COLUMNS`].
pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRow>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Ok(Vec::new());
    }
    for (i, expected) in CSV_COLUMNS.iter().enumerate() {
        match headers.get(i) {
            Some(h) if h == *expected => {}
            Some(h) => {
                return Err(Error::Schema(format!(
                    "column {} is '{h}', expected '{expected}'",
                    i + 1
                )))
            }
            None => return Err(Error::Schema(format!("missing column '{expected}'"))),
        }
    }
    if headers.len() > CSV_COLUMNS.len() {
        return Err(Error::Schema(format!(
            "unexpected column '{}'",
            &headers[CSV_COLUMNS.len()]
        )));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.deserialize::<CsvRow>().enumerate() {
        let row = record.map_err(|e| {
            let column = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => err
                    .field()
                    .and_then(|f| CSV_COLUMNS.get(f as usize))
                    .map(|c| format!("column '{c}'"))
                    .unwrap_or_else(|| "a column".into()),
                csv::ErrorKind::UnequalLengths { .. } => "row length".into(),
                _ => "a column".into(),
            };
            Error::Schema(format!("row {}: bad value in {column}: {e}", line + 2))
        })?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn import_csv(path: impl AsRef<Path>) -> Result<Vec<CsvRow>> {
    read_csv(std::io::BufReader::new(std::fs::File::open(path)?))
}
