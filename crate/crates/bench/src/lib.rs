//! Fixtures shared by the benchmarks in `benches/`.

use ksbetas::data::{sample_dirichlet_mixture, DirichletSpec};
use ksbetas::LabeledSimplexDataset;

/// Balanced mixture of `d` Dirichlet components, component `j` peaking at
/// vertex `j` with parameter `peak` against 1 elsewhere.
pub fn peaked_mixture(n: usize, d: usize, peak: f64, seed: u64) -> LabeledSimplexDataset {
    let components = (0..d)
        .map(|j| ((0..d).map(|m| if m == j { peak } else { 1.0 }).collect(), 1.0 / d as f64))
        .collect();
    sample_dirichlet_mixture(&DirichletSpec { components, n, seed }).expect("valid fixture")
}
