use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ksbetas::baselines::{distortion_kmeans, k_dirs, vertex_prototypes, Distortion, KDirsConfig};
use ksbetas::data::{sample_dirichlet_mixture, simu_spec};
use ksbetas::sbeta::MleOptions;
use ksbetas::special::{digamma, inv_digamma, log_gamma, trigamma};
use ksbetas::{fit, ClusterRunConfig, Estimator};
use ksbetas_bench::peaked_mixture;

fn special_functions(c: &mut Criterion) {
    let xs: Vec<f64> = (1..=1000).map(|i| i as f64 * 0.0731).collect();
    let mut g = c.benchmark_group("special");
    g.bench_function("log_gamma", |b| b.iter(|| xs.iter().map(|&x| log_gamma(black_box(x)).unwrap()).sum::<f64>()));
    g.bench_function("digamma", |b| b.iter(|| xs.iter().map(|&x| digamma(black_box(x)).unwrap()).sum::<f64>()));
    g.bench_function("trigamma", |b| b.iter(|| xs.iter().map(|&x| trigamma(black_box(x)).unwrap()).sum::<f64>()));
    let ys: Vec<f64> = xs.iter().map(|&x| digamma(x).unwrap()).collect();
    g.bench_function("inv_digamma", |b| b.iter(|| ys.iter().map(|&y| inv_digamma(black_box(y)).unwrap()).sum::<f64>()));
    g.finish();
}

fn k_sbetas(c: &mut Criterion) {
    let data = peaked_mixture(10_000, 10, 8.0, 1);
    let mut g = c.benchmark_group("k_sbetas_n1e4_d10");
    g.sample_size(10);
    let mom = ClusterRunConfig::new(10);
    g.bench_function("mom", |b| b.iter(|| fit(black_box(&data.data), &mom).unwrap()));
    let mle = ClusterRunConfig { estimator: Estimator::Mle(MleOptions::default()), ..ClusterRunConfig::new(10) };
    g.bench_function("mle", |b| b.iter(|| fit(black_box(&data.data), &mle).unwrap()));
    g.finish();
}

fn baselines(c: &mut Criterion) {
    let mut g = c.benchmark_group("baselines_simu");
    g.sample_size(10);
    for n in [1_000usize, 10_000] {
        let data = sample_dirichlet_mixture(&simu_spec(n, 1)).unwrap();
        let init = vertex_prototypes(3, 3);
        for (name, d) in [("k_means", Distortion::Euclidean), ("kl_k_means", Distortion::Kl), ("k_medians", Distortion::Manhattan)] {
            g.bench_with_input(BenchmarkId::new(name, n), &data.data, |b, x| {
                b.iter(|| distortion_kmeans(x, 3, d, &init, 25).unwrap())
            });
        }
        g.bench_with_input(BenchmarkId::new("k_dirs", n), &data.data, |b, x| {
            b.iter(|| k_dirs(x, &KDirsConfig::new(3)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("k_sbetas", n), &data.data, |b, x| {
            b.iter(|| fit(x, &ClusterRunConfig::new(3)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, special_functions, k_sbetas, baselines);
criterion_main!(benches);
