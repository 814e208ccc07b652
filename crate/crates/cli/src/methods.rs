//! Uniform entry point over every clustering method.

use std::time::Instant;

use ksbetas::baselines::{argmax_baseline, distortion_kmeans, k_dirs, vertex_prototypes, Distortion, KDirsConfig};
use ksbetas::cluster::Init;
use ksbetas::metrics::{argmax_align, hungarian_align};
use ksbetas::{fit, AlignmentMap, Assignment, ClusterRunConfig, MetricReport, PiMode, SimplexDataset};

use crate::config::{AlignKind, InitKind, MethodKind, MethodOptions};

/// Result of one clustering run. `seconds` covers the fit only.
#[derive(Debug, Clone)]
pub struct MethodOutput {
    pub assignment: Assignment,
    pub centroids: Vec<Vec<f64>>,
    pub iterations: usize,
    pub converged: bool,
    pub seconds: f64,
}

/// Runs `method` with K = D clusters.
pub fn run_method(data: &SimplexDataset, method: MethodKind, opts: &MethodOptions) -> ksbetas::Result<MethodOutput> {
    let (k, d) = (data.dim(), data.dim());
    let kmeans = |distortion| -> ksbetas::Result<MethodOutput> {
        let start = Instant::now();
        let out = distortion_kmeans(data, k, distortion, &vertex_prototypes(k, d), opts.iters)?;
        let seconds = start.elapsed().as_secs_f64();
        Ok(MethodOutput {
            assignment: out.assignment,
            centroids: out.prototypes,
            iterations: out.iterations,
            converged: out.converged,
            seconds,
        })
    };
    let sbetas = |delta: f64, pi_mode: PiMode| -> ksbetas::Result<MethodOutput> {
        let cfg = ClusterRunConfig {
            delta,
            constraints: opts.constraints(),
            max_iters: opts.iters,
            estimator: opts.estimator(),
            pi_mode,
            init: match opts.init {
                InitKind::Vertex => Init::Vertex,
            },
            ..ClusterRunConfig::new(k)
        };
        let start = Instant::now();
        let out = fit(data, &cfg)?;
        let seconds = start.elapsed().as_secs_f64();
        Ok(MethodOutput {
            centroids: out.model.centroids(),
            assignment: out.assignment,
            iterations: out.iterations,
            converged: out.converged,
            seconds,
        })
    };
    match method {
        MethodKind::Argmax => {
            let start = Instant::now();
            let assignment = argmax_baseline(data)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok(MethodOutput { assignment, centroids: vertex_prototypes(k, d), iterations: 0, converged: true, seconds })
        }
        MethodKind::KMeans => kmeans(Distortion::Euclidean),
        MethodKind::KlKMeans => kmeans(Distortion::Kl),
        MethodKind::KMedians => kmeans(Distortion::Manhattan),
        MethodKind::Hsc => kmeans(Distortion::Hilbert),
        MethodKind::KDirs => {
            let cfg = KDirsConfig { max_iters: opts.iters, unimodal: opts.unimodal, ..KDirsConfig::new(k) };
            let start = Instant::now();
            let out = k_dirs(data, &cfg)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok(MethodOutput {
                centroids: out.models.iter().map(|m| m.mean()).collect(),
                assignment: out.assignment,
                iterations: out.iterations,
                converged: out.converged,
                seconds,
            })
        }
        MethodKind::KSBetas => sbetas(opts.delta, opts.pi),
        MethodKind::KBetas => sbetas(0.0, opts.pi),
        MethodKind::KSBetasBiased => sbetas(opts.delta, PiMode::Uniform),
    }
}

pub fn align(centroids: &[Vec<f64>], kind: AlignKind) -> ksbetas::Result<AlignmentMap> {
    match kind {
        AlignKind::Hungarian => hungarian_align(centroids),
        AlignKind::Argmax => Ok(argmax_align(centroids)),
    }
}

/// Aligns the clusters and scores them against `truth`.
pub fn evaluate(
    out: &MethodOutput,
    truth: &[usize],
    kind: AlignKind,
) -> ksbetas::Result<(AlignmentMap, MetricReport)> {
    let alignment = align(&out.centroids, kind)?;
    let classes = out.centroids.first().map_or(0, Vec::len).max(truth.iter().max().map_or(0, |m| m + 1));
    let report = MetricReport::compute(&out.assignment, truth, classes, &alignment)?;
    Ok((alignment, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ksbetas::data::{sample_dirichlet_mixture, simu_spec};

    fn toy() -> (SimplexDataset, Vec<usize>) {
        let rows = [[0.9, 0.05, 0.05], [0.8, 0.1, 0.1], [0.1, 0.85, 0.05], [0.05, 0.9, 0.05], [0.1, 0.1, 0.8]];
        (SimplexDataset::from_rows(&rows).unwrap(), vec![0, 0, 1, 1, 2])
    }

    #[test]
    fn distortion_and_sbeta_methods_separate_a_toy_set() {
        let (data, truth) = toy();
        for m in MethodKind::ALL.into_iter().filter(|&m| m != MethodKind::KDirs) {
            let out = run_method(&data, m, &MethodOptions::default()).unwrap();
            let (alignment, report) = evaluate(&out, &truth, AlignKind::Hungarian).unwrap();
            assert!(alignment.is_bijective(), "{m}");
            assert_eq!(report.accuracy, 1.0, "{m}");
        }
    }

    #[test]
    fn every_method_runs_on_a_synthetic_sample() {
        let sample = sample_dirichlet_mixture(&simu_spec(3000, 4)).unwrap();
        for m in MethodKind::ALL {
            let out = run_method(&sample.data, m, &MethodOptions::default()).unwrap();
            assert_eq!(out.assignment.len(), 3000, "{m}");
            let (_, report) = evaluate(&out, &sample.labels, AlignKind::Hungarian).unwrap();
            assert!(report.nmi > 0.5, "{m}: {}", report.nmi);
        }
    }

    #[test]
    fn k_dirs_failure_surfaces_as_an_error() {
        // Two-point clusters leave the Dirichlet fixed point without a finite optimum.
        let (data, _) = toy();
        assert!(run_method(&data, MethodKind::KDirs, &MethodOptions::default()).is_err());
    }

    #[test]
    fn argmax_alignment_is_identity_for_the_argmax_method() {
        let (data, truth) = toy();
        let out = run_method(&data, MethodKind::Argmax, &MethodOptions::default()).unwrap();
        let (alignment, _) = evaluate(&out, &truth, AlignKind::Argmax).unwrap();
        assert_eq!(alignment.cluster_to_class, vec![0, 1, 2]);
    }
}
