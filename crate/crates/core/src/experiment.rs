//! Single-instance runs, parameter sweeps and their CSV output.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cost::CostModel;
use crate::exact::{solve_exact_nov, solve_exact_ov, ExactError};
use crate::format::{self, FormatError};
use crate::heuristic;
use crate::model::{Instance, Layout, OptimizerConfig};
use crate::simulate::{generate, SpecError, WorkloadSpec};

/// Node budget for exact solves in deterministic sweeps when none is given.
pub const DEFAULT_DETERMINISTIC_NODES: u64 = 2_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    ExactNov,
    ExactOv,
    GreedyNov,
    GreedyOv,
    Single,
    PerAttribute,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::ExactNov,
        Algorithm::ExactOv,
        Algorithm::GreedyNov,
        Algorithm::GreedyOv,
        Algorithm::Single,
        Algorithm::PerAttribute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::ExactNov => "exact_nov",
            Algorithm::ExactOv => "exact_ov",
            Algorithm::GreedyNov => "greedy_nov",
            Algorithm::GreedyOv => "greedy_ov",
            Algorithm::Single => "single",
            Algorithm::PerAttribute => "per_attribute",
        }
    }

    /// Whether the algorithm keeps storage overhead within α.
    pub fn respects_budget(self) -> bool {
        !matches!(self, Algorithm::PerAttribute)
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Algorithm::ExactNov | Algorithm::ExactOv)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown algorithm `{0}` (expected one of exact_nov, exact_ov, greedy_nov, greedy_ov, single, per_attribute)")]
pub struct UnknownAlgorithm(pub String);

impl FromStr for Algorithm {
    type Err = UnknownAlgorithm;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| UnknownAlgorithm(s.to_string()))
    }
}

/// Result of one algorithm on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub algorithm: Algorithm,
    /// None when the solver refused the instance.
    pub layout: Option<Layout>,
    /// Query I/O under the layout flavor's own covering rule; NaN on failure.
    pub query_io: f64,
    pub storage_overhead: f64,
    /// The exact solver's objective, when one ran.
    pub objective: Option<f64>,
    pub runtime: Duration,
    pub optimal: bool,
    pub error: Option<String>,
}

/// Runs `algorithm` and evaluates its layout. Runtime covers the solve
/// call only.
pub fn run_optimize(instance: &Instance, algorithm: Algorithm, config: &OptimizerConfig) -> RunOutcome {
    let started = Instant::now();
    let solved: Result<(Layout, Option<f64>, bool), ExactError> = match algorithm {
        Algorithm::ExactNov => solve_exact_nov(instance, config).map(|s| (s.layout, Some(s.objective), s.optimal)),
        Algorithm::ExactOv => solve_exact_ov(instance, config).map(|s| (s.layout, Some(s.objective), s.optimal)),
        Algorithm::GreedyNov => Ok((heuristic::greedy_nov(instance, config), None, false)),
        Algorithm::GreedyOv => Ok((heuristic::greedy_ov(instance, config), None, false)),
        Algorithm::Single => Ok((heuristic::single_partition(&instance.schema), None, false)),
        Algorithm::PerAttribute => Ok((heuristic::partition_per_attribute(&instance.schema), None, false)),
    };
    let runtime = started.elapsed();
    match solved {
        Ok((layout, objective, optimal)) => {
            let report = CostModel::for_instance(instance).query_io(&layout, &instance.workload);
            RunOutcome {
                algorithm,
                layout: Some(layout),
                query_io: report.query_io,
                storage_overhead: report.overhead,
                objective,
                runtime,
                optimal,
                error: None,
            }
        }
        Err(e) => RunOutcome {
            algorithm,
            layout: None,
            query_io: f64::NAN,
            storage_overhead: f64::NAN,
            objective: None,
            runtime,
            optimal: false,
            error: Some(e.to_string()),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepKind {
    Attributes,
    QueryKinds,
    Alpha,
}

impl SweepKind {
    pub fn name(self) -> &'static str {
        match self {
            SweepKind::Attributes => "attributes",
            SweepKind::QueryKinds => "query_kinds",
            SweepKind::Alpha => "alpha",
        }
    }

    /// Values swept in the original experiments.
    pub fn default_values(self) -> Vec<f64> {
        match self {
            SweepKind::Attributes => (1..=8).map(|i| 2.0 * i as f64).collect(),
            SweepKind::QueryKinds => (1..=8).map(|i| 2.0 * i as f64).collect(),
            SweepKind::Alpha => (0..=8).map(|i| 0.25 * i as f64).collect(),
        }
    }
}

impl FromStr for SweepKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [SweepKind::Attributes, SweepKind::QueryKinds, SweepKind::Alpha]
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown sweep kind `{s}` (expected attributes, query_kinds or alpha)"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub kind: SweepKind,
    pub values: Vec<f64>,
    pub runs_per_point: usize,
    pub algorithms: Vec<Algorithm>,
    /// Wall-clock budget per exact solve.
    pub time_budget_seconds: f64,
    /// Search-node budget per exact solve.
    pub node_budget: Option<u64>,
    /// Drop wall-clock budgets and report zero runtimes so that output
    /// depends on the config alone.
    pub deterministic: bool,
    #[serde(skip)]
    pub base_spec: WorkloadSpec,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            kind: SweepKind::Attributes,
            values: SweepKind::Attributes.default_values(),
            runs_per_point: 10,
            algorithms: Algorithm::ALL.to_vec(),
            time_budget_seconds: 60.0,
            node_budget: None,
            deterministic: false,
            base_spec: WorkloadSpec::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Invalid(String),
    #[error("sweep value {value}: {source}")]
    Spec { value: f64, source: SpecError },
    #[error(transparent)]
    Format(#[from] FormatError),
    #[error("{path}: {message}")]
    Output { path: String, message: String },
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        let fail = |m: String| Err(SweepError::Invalid(m));
        if self.values.is_empty() {
            return fail("values must be non-empty".into());
        }
        if self.runs_per_point == 0 {
            return fail("runs_per_point must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return fail("algorithms must be non-empty".into());
        }
        if !(self.time_budget_seconds.is_finite() && self.time_budget_seconds > 0.0) {
            return fail("time_budget_seconds must be positive".into());
        }
        for &v in &self.values {
            let ok = match self.kind {
                SweepKind::Alpha => v.is_finite() && v >= 0.0,
                _ => v >= 1.0 && v.fract() == 0.0,
            };
            if !ok {
                return fail(format!("value {v} is not valid for a {} sweep", self.kind.name()));
            }
        }
        Ok(())
    }

    /// The workload spec for one sweep point, seeded for one run.
    pub fn spec_for(&self, value: f64, seed: u64) -> WorkloadSpec {
        let mut spec = self.base_spec.clone();
        match self.kind {
            SweepKind::Attributes => spec.n_attributes = value as usize,
            SweepKind::QueryKinds => spec.n_query_kinds = value as usize,
            SweepKind::Alpha => spec.alpha = value,
        }
        spec.seed = seed;
        spec
    }

    pub fn optimizer_config(&self, alpha: f64) -> OptimizerConfig {
        let mut config = OptimizerConfig::new(alpha).expect("validated alpha");
        let nodes = match (self.node_budget, self.deterministic) {
            (Some(n), _) => Some(n),
            (None, true) => Some(DEFAULT_DETERMINISTIC_NODES),
            (None, false) => None,
        };
        if let Some(n) = nodes {
            config = config.with_node_limit(n);
        }
        if !self.deterministic {
            config = config.with_time_limit(Duration::from_secs_f64(self.time_budget_seconds));
        }
        config
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepFile {
    format_version: u32,
    #[serde(default)]
    sweep: SweepConfig,
    #[serde(default)]
    workload: WorkloadSpec,
}

pub fn sweep_config_from_str(text: &str, origin: &Path) -> Result<SweepConfig, FormatError> {
    let file: SweepFile = format::parse(text, origin)?;
    if file.format_version != format::FORMAT_VERSION {
        return Err(FormatError::Version { found: file.format_version });
    }
    Ok(SweepConfig { base_spec: file.workload, ..file.sweep })
}

pub fn sweep_config_to_string(config: &SweepConfig) -> Result<String, FormatError> {
    format::to_toml(&SweepFile {
        format_version: format::FORMAT_VERSION,
        sweep: config.clone(),
        workload: config.base_spec.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub sweep_value: f64,
    pub algorithm: Algorithm,
    pub run_seed: u64,
    pub query_io: f64,
    pub storage_overhead: f64,
    pub runtime_seconds: f64,
    pub optimal: bool,
    #[serde(skip)]
    pub run: usize,
}

pub const CSV_HEADER: &str = "sweep_value,algorithm,run_seed,query_io,storage_overhead,runtime_seconds,optimal";

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of run `run` at sweep point `point`.
pub fn child_seed(base: u64, point: usize, run: usize) -> u64 {
    splitmix64(splitmix64(base ^ splitmix64(point as u64)) ^ run as u64)
}

/// Runs every selected algorithm on the same generated instance for each
/// (point, run) pair. Rows come back sorted by sweep value, algorithm and
/// run. `jobs` caps worker threads; None uses rayon's default.
pub fn run_sweep(config: &SweepConfig, jobs: Option<usize>) -> Result<Vec<ResultRow>, SweepError> {
    config.validate()?;
    let tasks: Vec<(usize, usize)> =
        (0..config.values.len()).flat_map(|p| (0..config.runs_per_point).map(move |r| (p, r))).collect();
    for (p, &value) in config.values.iter().enumerate() {
        config
            .spec_for(value, child_seed(config.base_spec.seed, p, 0))
            .validate()
            .map_err(|source| SweepError::Spec { value, source })?;
    }
    let work = || {
        tasks.par_iter().map(|&(p, run)| run_point(config, p, run)).collect::<Result<Vec<Vec<ResultRow>>, SweepError>>()
    };
    let per_task = match jobs {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| SweepError::Invalid(e.to_string()))?
            .install(work),
        None => work(),
    }?;
    let mut rows: Vec<ResultRow> = per_task.into_iter().flatten().collect();
    rows.sort_by(|a, b| {
        a.sweep_value.total_cmp(&b.sweep_value).then(a.algorithm.cmp(&b.algorithm)).then(a.run.cmp(&b.run))
    });
    Ok(rows)
}

fn run_point(config: &SweepConfig, point: usize, run: usize) -> Result<Vec<ResultRow>, SweepError> {
    let value = config.values[point];
    let seed = child_seed(config.base_spec.seed, point, run);
    let spec = config.spec_for(value, seed);
    let instance = generate(&spec).map_err(|source| SweepError::Spec { value, source })?;
    let optimizer = config.optimizer_config(spec.alpha);
    let mut algorithms = config.algorithms.clone();
    algorithms.sort();
    algorithms.dedup();
    Ok(algorithms
        .into_iter()
        .map(|algorithm| {
            let out = run_optimize(&instance, algorithm, &optimizer);
            ResultRow {
                sweep_value: value,
                algorithm,
                run_seed: seed,
                query_io: out.query_io,
                storage_overhead: out.storage_overhead,
                runtime_seconds: if config.deterministic { 0.0 } else { out.runtime.as_secs_f64() },
                optimal: out.optimal,
                run,
            }
        })
        .collect())
}

/// Mean and population standard deviation of the non-NaN values.
pub fn mean_stddev(values: impl IntoIterator<Item = f64>) -> Option<(f64, f64)> {
    let xs: Vec<f64> = values.into_iter().filter(|x| !x.is_nan()).collect();
    if xs.is_empty() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    Some((mean, var.sqrt()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub sweep_value: f64,
    pub algorithm: Algorithm,
    pub runs: usize,
    pub completed: usize,
    pub optimal_runs: usize,
    pub query_io_mean: f64,
    pub query_io_stddev: f64,
    pub storage_overhead_mean: f64,
    pub storage_overhead_stddev: f64,
    pub runtime_seconds_mean: f64,
    pub runtime_seconds_stddev: f64,
    /// Mean over runs of 1 − query_io / single-partition query_io; NaN
    /// when the sweep did not include the single-partition baseline.
    pub io_reduction_mean: f64,
}

/// Per (sweep value, algorithm) statistics. Failed runs (NaN metrics) are
/// counted in `runs` but excluded from the means.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut keys: Vec<(f64, Algorithm)> = rows.iter().map(|r| (r.sweep_value, r.algorithm)).collect();
    keys.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    keys.dedup();
    keys.into_iter()
        .map(|(value, algorithm)| {
            let group: Vec<&ResultRow> =
                rows.iter().filter(|r| r.sweep_value == value && r.algorithm == algorithm).collect();
            let stat =
                |f: fn(&ResultRow) -> f64| mean_stddev(group.iter().map(|r| f(r))).unwrap_or((f64::NAN, f64::NAN));
            let (io_mean, io_sd) = stat(|r| r.query_io);
            let (h_mean, h_sd) = stat(|r| r.storage_overhead);
            let (t_mean, t_sd) = stat(|r| r.runtime_seconds);
            let reductions = group.iter().filter_map(|r| {
                rows.iter()
                    .find(|s| s.sweep_value == value && s.run == r.run && s.algorithm == Algorithm::Single)
                    .map(|s| 1.0 - r.query_io / s.query_io)
            });
            SummaryRow {
                sweep_value: value,
                algorithm,
                runs: group.len(),
                completed: group.iter().filter(|r| !r.query_io.is_nan()).count(),
                optimal_runs: group.iter().filter(|r| r.optimal).count(),
                query_io_mean: io_mean,
                query_io_stddev: io_sd,
                storage_overhead_mean: h_mean,
                storage_overhead_stddev: h_sd,
                runtime_seconds_mean: t_mean,
                runtime_seconds_stddev: t_sd,
                io_reduction_mean: mean_stddev(reductions).map_or(f64::NAN, |(m, _)| m),
            }
        })
        .collect()
}

fn csv_error(path: &str, e: impl fmt::Display) -> SweepError {
    SweepError::Output { path: path.to_string(), message: e.to_string() }
}

/// Writes rows as CSV with the [`CSV_HEADER`] header, even when empty.
pub fn write_csv<W: Write>(rows: &[ResultRow], out: W, name: &str) -> Result<(), SweepError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(CSV_HEADER.split(',')).map_err(|e| csv_error(name, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(name, e))?;
    }
    w.flush().map_err(|e| csv_error(name, e))
}

pub const SUMMARY_NOTE: &str =
    "# stddev is the population standard deviation; runtime_seconds covers the solve call only";

pub fn write_summary<W: Write>(rows: &[ResultRow], mut out: W, name: &str) -> Result<(), SweepError> {
    writeln!(out, "{SUMMARY_NOTE}").map_err(|e| csv_error(name, e))?;
    let mut w = csv::Writer::from_writer(out);
    let summary = summarize(rows);
    if summary.is_empty() {
        w.write_record([
            "sweep_value",
            "algorithm",
            "runs",
            "completed",
            "optimal_runs",
            "query_io_mean",
            "query_io_stddev",
            "storage_overhead_mean",
            "storage_overhead_stddev",
            "runtime_seconds_mean",
            "runtime_seconds_stddev",
            "io_reduction_mean",
        ])
        .map_err(|e| csv_error(name, e))?;
    }
    for row in &summary {
        w.serialize(row).map_err(|e| csv_error(name, e))?;
    }
    w.flush().map_err(|e| csv_error(name, e))
}

pub fn write_csv_file(rows: &[ResultRow], path: &Path) -> Result<(), SweepError> {
    let name = path.display().to_string();
    let file = std::fs::File::create(path).map_err(|e| csv_error(&name, e))?;
    write_csv(rows, std::io::BufWriter::new(file), &name)
}

pub fn write_summary_file(rows: &[ResultRow], path: &Path) -> Result<(), SweepError> {
    let name = path.display().to_string();
    let file = std::fs::File::create(path).map_err(|e| csv_error(&name, e))?;
    write_summary(rows, std::io::BufWriter::new(file), &name)
}

/// A matplotlib script that plots mean and stddev of each metric against
/// the sweep value, one line per algorithm.
pub fn plot_script(summary_file: &str, kind: SweepKind) -> String {
    format!(
        r##"#!/usr/bin/env python3
# Plots {summary_file} (written by `railway sweep`). Needs pandas and matplotlib.
import sys
import pandas as pd
import matplotlib.pyplot as plt

path = sys.argv[1] if len(sys.argv) > 1 else "{summary_file}"
data = pd.read_csv(path, comment="#")
for metric, label in [("query_io", "query I/O (bytes)"),
                      ("storage_overhead", "storage overhead"),
                      ("runtime_seconds", "running time (s)")]:
    fig, ax = plt.subplots()
    for algorithm, group in data.groupby("algorithm", sort=False):
        ax.errorbar(group["sweep_value"], group[metric + "_mean"],
                    yerr=group[metric + "_stddev"], label=algorithm, capsize=3, marker="o")
    ax.set_xlabel("{kind}")
    ax.set_ylabel(label)
    ax.legend()
    fig.savefig(metric + ".png", dpi=150, bbox_inches="tight")
"##,
        kind = kind.name()
    )
}
