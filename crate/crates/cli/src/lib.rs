//! Command-line front end: dataset generation, single clustering runs and
//! benchmark matrices over all methods.

pub mod config;
pub mod methods;
pub mod report;
pub mod runner;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use ksbetas::data::{load_labels, load_predictions, make_isimus, sample_dirichlet_mixture, save_dataset, save_labels, simu_spec, DataFormat};

use config::{AlignKind, BenchConfig, EstimatorKind, InitKind, MethodKind, MethodOptions};
use report::{ClusterReport, SCHEMA_VERSION};

/// Failure classes, each with its own process exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("method failure: {0}")]
    Method(String),
    #[error("report error: {0}")]
    Report(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Method(_) | CliError::Report(_) => 3,
        }
    }

    /// Error raised while reading or writing data.
    pub fn data(e: ksbetas::Error) -> Self {
        CliError::Data(e.to_string())
    }

    /// Error raised by a clustering method.
    pub fn method(e: ksbetas::Error) -> Self {
        match e {
            ksbetas::Error::Config(m) => CliError::Config(m),
            ksbetas::Error::Data { .. } => CliError::Data(e.to_string()),
            other => CliError::Method(other.to_string()),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }
}

#[derive(Debug, Parser)]
#[command(name = "ksbetas", version, about = "Clustering of softmax predictions on the probability simplex")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetArg {
    Simu,
    Isimus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Binary,
}

impl From<FormatArg> for DataFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => DataFormat::Csv,
            FormatArg::Binary => DataFormat::Binary,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a synthetic Dirichlet-mixture dataset and its labels.
    Simulate {
        #[arg(long, value_enum)]
        dataset: DatasetArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Data file; labels go next to it with the extension `labels`.
        /// For `isimus` the mixture index is appended to the file stem.
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "csv")]
        format: FormatArg,
    },
    /// Cluster one prediction file.
    Cluster {
        #[arg(long)]
        method: String,
        #[arg(long)]
        input: PathBuf,
        /// Ground-truth labels, one integer per line.
        #[arg(long)]
        labels: Option<PathBuf>,
        #[arg(long, default_value_t = 0.15)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        tau_minus: f64,
        #[arg(long, default_value_t = 165.0)]
        tau_plus: f64,
        #[arg(long, default_value_t = 25)]
        iters: usize,
        #[arg(long, default_value = "mom")]
        estimator: String,
        #[arg(long, default_value = "adaptive")]
        pi: String,
        #[arg(long, default_value = "vertex")]
        init: String,
        #[arg(long, default_value = "hungarian")]
        align: String,
        /// Report path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Writes the aligned class of every point, one per line.
        #[arg(long)]
        labels_out: Option<PathBuf>,
    },
    /// Run a method matrix described by a configuration file.
    Bench {
        #[arg(long)]
        config: PathBuf,
        /// Directory receiving `report.json` and `report.txt`.
        #[arg(long)]
        out: PathBuf,
    },
}

/// `<out>.labels`, or `<stem>-<j>.<ext>` plus labels for mixture `j`.
pub fn simulate_paths(out: &Path, mixture: Option<usize>) -> (PathBuf, PathBuf) {
    let data = match mixture {
        None => out.to_path_buf(),
        Some(j) => {
            let stem = out.file_stem().map_or_else(String::new, |s| s.to_string_lossy().into_owned());
            let name = match out.extension() {
                Some(ext) => format!("{stem}-{j}.{}", ext.to_string_lossy()),
                None => format!("{stem}-{j}"),
            };
            out.with_file_name(name)
        }
    };
    let labels = data.with_extension("labels");
    (data, labels)
}

fn simulate(dataset: DatasetArg, n: usize, seed: u64, out: &Path, format: FormatArg) -> Result<(), CliError> {
    if n == 0 {
        return Err(CliError::Config("n must be at least 1".into()));
    }
    let specs = match dataset {
        DatasetArg::Simu => vec![(None, simu_spec(n, seed))],
        DatasetArg::Isimus => make_isimus(n, seed).into_iter().enumerate().map(|(j, s)| (Some(j), s)).collect(),
    };
    for (mixture, spec) in specs {
        let sample = sample_dirichlet_mixture(&spec).map_err(CliError::method)?;
        let (data_path, label_path) = simulate_paths(out, mixture);
        save_dataset(&data_path, &sample.data, format.into()).map_err(CliError::data)?;
        save_labels(&label_path, &sample.labels).map_err(CliError::data)?;
    }
    Ok(())
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn cluster(
    method: &str,
    input: &Path,
    labels: Option<&Path>,
    opts: MethodOptions,
    out: Option<&Path>,
    labels_out: Option<&Path>,
) -> Result<String, CliError> {
    let method: MethodKind = method.parse()?;
    opts.validate()?;
    let data = load_predictions(input, None).map_err(CliError::data)?;
    let truth = labels.map(load_labels).transpose().map_err(CliError::data)?;
    if let Some(t) = &truth {
        if t.len() != data.len() {
            return Err(CliError::Data(format!("{} labels for {} points", t.len(), data.len())));
        }
    }
    let output = methods::run_method(&data, method, &opts).map_err(CliError::method)?;
    let (alignment, metrics) = match &truth {
        Some(t) => {
            let (a, m) = methods::evaluate(&output, t, opts.align).map_err(CliError::method)?;
            (a, Some(m))
        }
        None => (methods::align(&output.centroids, opts.align).map_err(CliError::method)?, None),
    };
    if let Some(path) = labels_out {
        save_labels(path, &alignment.apply(&output.assignment)).map_err(CliError::data)?;
    }
    let report = ClusterReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        method,
        options: opts,
        input: input.display().to_string(),
        n: data.len(),
        d: data.dim(),
        iterations: output.iterations,
        converged: output.converged,
        seconds: output.seconds,
        cluster_sizes: output.assignment.counts(),
        centroids: output.centroids,
        alignment,
        metrics,
    };
    let json = report.to_json()?;
    if let Some(path) = out {
        write_file(path, &json)?;
    }
    Ok(json)
}

fn bench(config: &Path, out: &Path) -> Result<(), CliError> {
    let text = fs::read_to_string(config).map_err(|e| CliError::Config(format!("{}: {e}", config.display())))?;
    let config = BenchConfig::parse(&text)?;
    let report = runner::run_bench(&config)?;
    let (json, txt) = (report.to_json()?, report.to_text()?);
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write_file(&out.join("report.json"), &json)?;
    write_file(&out.join("report.txt"), &txt)
}

/// Executes a parsed command line. Text meant for standard output is
/// returned.
pub fn run(cli: Cli) -> Result<Option<String>, CliError> {
    match cli.command {
        Command::Simulate { dataset, n, seed, out, format } => simulate(dataset, n, seed, &out, format).map(|_| None),
        Command::Cluster {
            method,
            input,
            labels,
            delta,
            tau_minus,
            tau_plus,
            iters,
            estimator,
            pi,
            init,
            align,
            out,
            labels_out,
        } => {
            let mut opts = MethodOptions { delta, tau_minus, tau_plus, iters, ..MethodOptions::default() };
            opts.estimator = estimator.parse::<EstimatorKind>()?;
            opts.set("pi", &pi)?;
            opts.init = init.parse::<InitKind>()?;
            opts.align = align.parse::<AlignKind>()?;
            let json = cluster(&method, &input, labels.as_deref(), opts, out.as_deref(), labels_out.as_deref())?;
            Ok(out.is_none().then_some(json))
        }
        Command::Bench { config, out } => bench(&config, &out).map(|_| None),
    }
}
