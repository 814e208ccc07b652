//! JSON and text reports.
//!
//! Every report is checked with `validate` before it is written. Scores are
//! fractions in [0, 1]; spreads are population standard deviations. The
//! `seconds` fields are the only values that differ between two runs of the
//! same configuration.

use std::fmt::Write as _;

use ksbetas::{AlignmentMap, MetricReport};
use serde::{Deserialize, Serialize};

use crate::config::{BenchConfig, MethodKind, MethodOptions};
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Fails,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    pub nmi: f64,
    pub accuracy: f64,
    pub mean_iou: f64,
}

impl From<&MetricReport> for Scores {
    fn from(r: &MetricReport) -> Self {
        Self { nmi: r.nmi, accuracy: r.accuracy, mean_iou: r.mean_iou }
    }
}

/// One (method, run, mixture) cell of a bench.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub label: String,
    pub method: MethodKind,
    pub run: usize,
    /// Mixture index for multi-dataset benches.
    pub mixture: Option<usize>,
    pub seed: Option<u64>,
    pub status: RunStatus,
    pub error: Option<String>,
    pub scores: Option<Scores>,
    pub iterations: Option<usize>,
    pub converged: Option<bool>,
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
}

impl Summary {
    fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        Some(Self { mean, std: var.sqrt() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub label: String,
    pub method: MethodKind,
    pub options: MethodOptions,
    pub runs: usize,
    pub fails: usize,
    pub nmi: Option<Summary>,
    pub accuracy: Option<Summary>,
    pub mean_iou: Option<Summary>,
    pub seconds: Option<Summary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub config: BenchConfig,
    pub threads: usize,
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<Aggregate>,
}

fn aggregate(config: &BenchConfig, records: &[RunRecord]) -> Vec<Aggregate> {
    config
        .methods
        .iter()
        .map(|spec| {
            let mine: Vec<&RunRecord> = records.iter().filter(|r| r.label == spec.label).collect();
            let ok: Vec<&Scores> = mine.iter().filter_map(|r| r.scores.as_ref()).collect();
            let pick = |f: fn(&Scores) -> f64| Summary::of(&ok.iter().map(|s| f(s)).collect::<Vec<_>>());
            let secs: Vec<f64> = mine.iter().filter_map(|r| r.seconds).collect();
            Aggregate {
                label: spec.label.clone(),
                method: spec.method,
                options: spec.options.clone(),
                runs: mine.len(),
                fails: mine.iter().filter(|r| r.status == RunStatus::Fails).count(),
                nmi: pick(|s| s.nmi),
                accuracy: pick(|s| s.accuracy),
                mean_iou: pick(|s| s.mean_iou),
                seconds: Summary::of(&secs),
            }
        })
        .collect()
}

fn check_fraction(what: &str, v: f64) -> Result<(), CliError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(CliError::Report(format!("{what} = {v} is not a fraction")))
    }
}

impl BenchReport {
    pub fn new(config: BenchConfig, threads: usize, records: Vec<RunRecord>) -> Self {
        let aggregates = aggregate(&config, &records);
        Self {
            schema_version: SCHEMA_VERSION,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            threads,
            records,
            aggregates,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Report(format!("schema version {} != {SCHEMA_VERSION}", self.schema_version)));
        }
        for r in &self.records {
            if !self.config.methods.iter().any(|m| m.label == r.label && m.method == r.method) {
                return Err(CliError::Report(format!("record for unknown method '{}'", r.label)));
            }
            if r.run >= self.config.runs {
                return Err(CliError::Report(format!("run index {} >= {}", r.run, self.config.runs)));
            }
            match (r.status, &r.scores, &r.error) {
                (RunStatus::Ok, Some(s), None) => {
                    check_fraction("nmi", s.nmi)?;
                    check_fraction("accuracy", s.accuracy)?;
                    check_fraction("mean_iou", s.mean_iou)?;
                }
                (RunStatus::Fails, None, Some(_)) => {}
                _ => return Err(CliError::Report(format!("inconsistent record for '{}' run {}", r.label, r.run))),
            }
            if r.seconds.is_some_and(|s| !(s.is_finite() && s >= 0.0)) {
                return Err(CliError::Report("negative or non-finite timing".into()));
            }
        }
        if aggregate(&self.config, &self.records) != self.aggregates {
            return Err(CliError::Report("aggregates do not match records".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        self.validate()?;
        serde_json::to_string_pretty(self).map_err(|e| CliError::Report(e.to_string()))
    }

    /// Fixed-width table with scores in percent.
    pub fn to_text(&self) -> Result<String, CliError> {
        self.validate()?;
        let mut s = String::new();
        let pct = |m: &Option<Summary>| m.as_ref().map_or("-".to_string(), |m| format!("{:.2} ± {:.2}", 100.0 * m.mean, 100.0 * m.std));
        let _ = writeln!(s, "runs per method: {}", self.config.runs);
        let _ = writeln!(
            s,
            "{:<20} {:>5} {:>5} {:>16} {:>16} {:>16} {:>10}",
            "method", "runs", "fails", "NMI %", "accuracy %", "mIoU %", "seconds"
        );
        for a in &self.aggregates {
            let secs = a.seconds.as_ref().map_or("-".to_string(), |m| format!("{:.4}", m.mean));
            let _ = writeln!(
                s,
                "{:<20} {:>5} {:>5} {:>16} {:>16} {:>16} {:>10}",
                a.label,
                a.runs,
                a.fails,
                pct(&a.nmi),
                pct(&a.accuracy),
                pct(&a.mean_iou),
                secs
            );
        }
        Ok(s)
    }
}

/// Report of a single `cluster` invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub method: MethodKind,
    pub options: MethodOptions,
    pub input: String,
    pub n: usize,
    pub d: usize,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
    pub cluster_sizes: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub alignment: AlignmentMap,
    pub metrics: Option<MetricReport>,
}

impl ClusterReport {
    pub fn validate(&self) -> Result<(), CliError> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(CliError::Report(format!("schema version {} != {SCHEMA_VERSION}", self.schema_version)));
        }
        if self.cluster_sizes.iter().sum::<usize>() != self.n {
            return Err(CliError::Report("cluster sizes do not sum to n".into()));
        }
        if self.alignment.cluster_to_class.len() != self.cluster_sizes.len() {
            return Err(CliError::Report("alignment does not cover every cluster".into()));
        }
        if let Some(m) = &self.metrics {
            check_fraction("nmi", m.nmi)?;
            check_fraction("accuracy", m.accuracy)?;
            check_fraction("mean_iou", m.mean_iou)?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        self.validate()?;
        serde_json::to_string_pretty(self).map_err(|e| CliError::Report(e.to_string()))
    }
}
