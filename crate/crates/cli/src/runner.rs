//! Parallel execution of a bench matrix.

use std::path::Path;

use ksbetas::data::{load_labels, load_predictions, make_isimus, sample_dirichlet_mixture, simu_spec};
use ksbetas::LabeledSimplexDataset;
use rayon::prelude::*;

use crate::config::{BenchConfig, DatasetSpec, MethodSpec};
use crate::methods::{evaluate, run_method};
use crate::report::{BenchReport, RunRecord, RunStatus, Scores};
use crate::CliError;

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "KSBETAS_THREADS";

struct Instance {
    run: usize,
    mixture: Option<usize>,
    seed: Option<u64>,
    data: LabeledSimplexDataset,
}

fn thread_count() -> Result<usize, CliError> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

/// Datasets of every run. Run `r` of a synthetic bench uses seed
/// `seed + r`; a file dataset is shared by all runs.
fn instances(config: &BenchConfig) -> Result<Vec<Instance>, CliError> {
    let runs = 0..config.runs;
    match &config.dataset {
        DatasetSpec::Simu { n, seed } => runs
            .into_par_iter()
            .map(|run| {
                let s = seed.wrapping_add(run as u64);
                let data = sample_dirichlet_mixture(&simu_spec(*n, s)).map_err(CliError::data)?;
                Ok(Instance { run, mixture: None, seed: Some(s), data })
            })
            .collect(),
        DatasetSpec::Isimus { n, seed } => {
            let per_run: Vec<Vec<Instance>> = runs
                .into_par_iter()
                .map(|run| {
                    let s = seed.wrapping_add(run as u64);
                    make_isimus(*n, s)
                        .iter()
                        .enumerate()
                        .map(|(j, spec)| {
                            let data = sample_dirichlet_mixture(spec).map_err(CliError::data)?;
                            Ok(Instance { run, mixture: Some(j), seed: Some(s), data })
                        })
                        .collect::<Result<Vec<_>, CliError>>()
                })
                .collect::<Result<_, _>>()?;
            Ok(per_run.into_iter().flatten().collect())
        }
        DatasetSpec::File { input, labels } => {
            let labels = labels
                .as_ref()
                .ok_or_else(|| CliError::Config("bench on a file dataset needs labels = <path>".into()))?;
            if config.runs == 0 {
                return Ok(Vec::new());
            }
            let points = load_predictions(Path::new(input), None).map_err(CliError::data)?;
            let truth = load_labels(Path::new(labels)).map_err(CliError::data)?;
            let data = LabeledSimplexDataset::new(points, truth).map_err(CliError::data)?;
            Ok(runs.map(|run| Instance { run, mixture: None, seed: None, data: data.clone() }).collect())
        }
    }
}

fn execute(spec: &MethodSpec, inst: &Instance) -> RunRecord {
    let result = run_method(&inst.data.data, spec.method, &spec.options)
        .and_then(|out| evaluate(&out, &inst.data.labels, spec.options.align).map(|(_, m)| (out, m)));
    let base = RunRecord {
        label: spec.label.clone(),
        method: spec.method,
        run: inst.run,
        mixture: inst.mixture,
        seed: inst.seed,
        status: RunStatus::Fails,
        error: None,
        scores: None,
        iterations: None,
        converged: None,
        seconds: None,
    };
    match result {
        Ok((out, metrics)) => RunRecord {
            status: RunStatus::Ok,
            scores: Some(Scores::from(&metrics)),
            iterations: Some(out.iterations),
            converged: Some(out.converged),
            seconds: Some(out.seconds),
            ..base
        },
        Err(e) => RunRecord { error: Some(e.to_string()), ..base },
    }
}

/// Runs every (method, instance) pair on a dedicated thread pool. Records
/// come back in configuration order regardless of scheduling. A method
/// failure is recorded, not raised.
pub fn run_bench(config: &BenchConfig) -> Result<BenchReport, CliError> {
    let threads = thread_count()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start thread pool: {e}")))?;
    pool.install(|| {
        let insts = instances(config)?;
        let pairs: Vec<(&MethodSpec, &Instance)> =
            config.methods.iter().flat_map(|m| insts.iter().map(move |i| (m, i))).collect();
        let records: Vec<RunRecord> = pairs.into_par_iter().map(|(m, i)| execute(m, i)).collect();
        Ok(BenchReport::new(config.clone(), threads, records))
    })
}
