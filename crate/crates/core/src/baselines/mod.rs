//! Comparison methods: distortion k-means variants, the argmax rule and
//! Dirichlet-mixture clustering (k-Dirs).

mod dirichlet;
mod distortion;

pub use dirichlet::{dirichlet_mle, k_dirs, DirichletMleOptions, DirichletParams, KDirsConfig, KDirsOutcome};
pub use distortion::{
    distortion_kmeans, hilbert_distance, kl_divergence, vertex_prototypes, Distortion, KMeansOutcome,
    HILBERT_EXACT_LIMIT, SATURATED_DISTANCE,
};

use crate::error::Result;
use crate::simplex::{Assignment, SimplexDataset};

/// Labels every point with its largest coordinate, ties to the lowest index.
/// The assignment has `k = D` clusters.
pub fn argmax_baseline(data: &SimplexDataset) -> Result<Assignment> {
    let labels = data.rows().map(argmax).collect();
    Assignment::new(labels, data.dim())
}

pub(crate) fn argmax(x: &[f64]) -> usize {
    let mut best = 0;
    for (n, &v) in x.iter().enumerate().skip(1) {
        if v > x[best] {
            best = n;
        }
    }
    best
}
