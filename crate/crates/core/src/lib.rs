//! Clustering of points on the probability simplex, aimed at adjusting the
//! softmax outputs of black-box classifiers.
//!
//! The central method is [`cluster::fit`] (k-sBetas): a hard-assignment
//! block-coordinate descent over a product of scaled-Beta marginals with
//! bounded concentration. The crate also ships the distortion baselines
//! (k-means, KL k-means, k-medians, Hilbert simplex clustering), a Dirichlet
//! mixture baseline, cluster-to-class alignment and evaluation metrics, and
//! the synthetic Dirichlet-mixture benchmarks.

pub mod baselines;
pub mod cluster;
pub mod data;
mod error;
pub mod metrics;
pub mod sbeta;
pub mod simplex;
pub mod special;

pub use cluster::{fit, ClusterModel, ClusterRunConfig, Estimator, FitOutcome, PiMode};
pub use error::{Error, Result};
pub use metrics::{AlignmentMap, MetricReport};
pub use sbeta::{ConstraintConfig, SBeta, SBetaParams};
pub use simplex::{Assignment, LabeledSimplexDataset, SimplexDataset};
