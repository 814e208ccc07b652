use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{Assignment, SimplexDataset, INTERIOR_EPS};
use crate::special::{digamma_unchecked, inv_digamma, ln_gamma_unchecked};

/// Parameters of one Dirichlet density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DirichletParams {
    pub alpha: Vec<f64>,
}

impl DirichletParams {
    pub fn new(alpha: Vec<f64>) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Domain("Dirichlet needs at least one coordinate".into()));
        }
        if let Some(a) = alpha.iter().find(|a| !(a.is_finite() && **a > 0.0)) {
            return Err(Error::Domain(format!("Dirichlet parameters must be positive and finite, got {a}")));
        }
        Ok(Self { alpha })
    }

    pub fn dim(&self) -> usize {
        self.alpha.len()
    }

    /// `ln Gamma(sum alpha) - sum ln Gamma(alpha_n)`.
    pub fn log_normalizer(&self) -> f64 {
        ln_gamma_unchecked(self.alpha.iter().sum()) - self.alpha.iter().map(|&a| ln_gamma_unchecked(a)).sum::<f64>()
    }

    pub fn log_pdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::Shape { expected: self.dim(), found: x.len() });
        }
        Ok(self.log_normalizer() + self.alpha.iter().zip(x).map(|(a, v)| (a - 1.0) * v.ln()).sum::<f64>())
    }

    /// `alpha / sum alpha`.
    pub fn mean(&self) -> Vec<f64> {
        let s: f64 = self.alpha.iter().sum();
        self.alpha.iter().map(|a| a / s).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DirichletMleOptions {
    pub max_iters: usize,
    /// Bound on `max_n |psi(alpha_n) - psi(sum alpha) - mean ln x_n|`.
    pub tol: f64,
}

impl Default for DirichletMleOptions {
    fn default() -> Self {
        Self { max_iters: 1000, tol: 1e-8 }
    }
}

/// Parameter magnitude treated as divergence of the fixed point.
const ALPHA_LIMIT: f64 = 1e12;

fn residual(alpha: &[f64], mean_log: &[f64]) -> f64 {
    let psi_sum = digamma_unchecked(alpha.iter().sum());
    alpha.iter().zip(mean_log).map(|(&a, &m)| (digamma_unchecked(a) - psi_sum - m).abs()).fold(0.0, f64::max)
}

/// Fixed point `alpha_n <- psi^-1(psi(sum alpha) + mean ln x_n)` from the
/// per-coordinate mean logs. Returns the iterate and the iteration count.
pub(crate) fn dirichlet_mle_from_mean_log(
    mean_log: &[f64],
    init: &DirichletParams,
    opts: DirichletMleOptions,
) -> Result<(DirichletParams, usize)> {
    if init.dim() != mean_log.len() {
        return Err(Error::Shape { expected: mean_log.len(), found: init.dim() });
    }
    if mean_log.iter().any(|m| !m.is_finite()) {
        return Err(Error::Convergence { what: "Dirichlet MLE", iterations: 0, residual: f64::INFINITY });
    }
    let mut alpha = init.alpha.clone();
    let mut res = residual(&alpha, mean_log);
    for it in 0..opts.max_iters {
        if res <= opts.tol {
            return Ok((DirichletParams { alpha }, it));
        }
        let psi_sum = digamma_unchecked(alpha.iter().sum());
        for (a, &m) in alpha.iter_mut().zip(mean_log) {
            *a = inv_digamma(psi_sum + m).map_err(|_| Error::Convergence {
                what: "Dirichlet MLE",
                iterations: it + 1,
                residual: res,
            })?;
        }
        if alpha.iter().any(|a| !(a.is_finite() && *a > 0.0 && *a < ALPHA_LIMIT)) {
            return Err(Error::Convergence { what: "Dirichlet MLE", iterations: it + 1, residual: res });
        }
        res = residual(&alpha, mean_log);
    }
    if res <= opts.tol {
        return Ok((DirichletParams { alpha }, opts.max_iters));
    }
    Err(Error::Convergence { what: "Dirichlet MLE", iterations: opts.max_iters, residual: res })
}

/// Maximum-likelihood Dirichlet fit of a weighted sample (`None` means unit
/// weights). Points are interior-projected before taking logs.
pub fn dirichlet_mle(
    points: &SimplexDataset,
    weights: Option<&[f64]>,
    init: &DirichletParams,
    opts: DirichletMleOptions,
) -> Result<DirichletParams> {
    if points.is_empty() {
        return Err(Error::Domain("empty sample".into()));
    }
    if let Some(w) = weights {
        if w.len() != points.len() {
            return Err(Error::Shape { expected: points.len(), found: w.len() });
        }
    }
    let interior = points.interior(INTERIOR_EPS);
    let mut mean_log = vec![0.0; points.dim()];
    let mut total = 0.0;
    for (i, x) in interior.rows().enumerate() {
        let w = weights.map_or(1.0, |w| w[i]);
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::Domain(format!("invalid weight {w} at {i}")));
        }
        for (m, v) in mean_log.iter_mut().zip(x) {
            *m += w * v.ln();
        }
        total += w;
    }
    if total <= 0.0 {
        return Err(Error::Domain("sample has zero total weight".into()));
    }
    mean_log.iter_mut().for_each(|m| *m /= total);
    dirichlet_mle_from_mean_log(&mean_log, init, opts).map(|(p, _)| p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KDirsConfig {
    pub k: usize,
    pub max_iters: usize,
    pub mle: DirichletMleOptions,
    /// Clamp every parameter to at least `1 + 1e-3` after estimation.
    pub unimodal: bool,
    /// Initial parameters are `1 + init_concentration * [n == k]`.
    pub init_concentration: f64,
}

impl KDirsConfig {
    pub fn new(k: usize) -> Self {
        Self { k, max_iters: 25, mle: DirichletMleOptions::default(), unimodal: false, init_concentration: 82.5 }
    }
}

/// Lower bound of the unimodal clamp.
pub const UNIMODAL_FLOOR: f64 = 1.0 + 1e-3;

#[derive(Debug, Clone, PartialEq)]
pub struct KDirsOutcome {
    pub models: Vec<DirichletParams>,
    pub proportions: Vec<f64>,
    pub assignment: Assignment,
    pub iterations: usize,
    pub converged: bool,
}

/// Hard-assignment Dirichlet mixture clustering with adaptive proportions.
///
/// Mirrors the k-sBetas loop: parameter block (warm-started fixed point per
/// non-empty cluster; empty clusters keep their parameters), assignment
/// block, proportion block. Any estimator failure aborts the run.
pub fn k_dirs(data: &SimplexDataset, cfg: &KDirsConfig) -> Result<KDirsOutcome> {
    let (k, d) = (cfg.k, data.dim());
    if k == 0 || k > d {
        return Err(Error::Config(format!("k-Dirs needs 1 <= k <= d, got k = {k}, d = {d}")));
    }
    if data.len() < k {
        return Err(Error::Config(format!("need at least k = {k} points, got {}", data.len())));
    }
    if cfg.max_iters == 0 || cfg.init_concentration.is_nan() || cfg.init_concentration <= 0.0 {
        return Err(Error::Config("k-Dirs needs max_iters >= 1 and a positive initial concentration".into()));
    }
    let logs: Vec<f64> = data.interior(INTERIOR_EPS).as_flat().iter().map(|v| v.ln()).collect();
    let mut models: Vec<DirichletParams> = (0..k)
        .map(|j| DirichletParams {
            alpha: (0..d).map(|n| if n == j { 1.0 + cfg.init_concentration } else { 1.0 }).collect(),
        })
        .collect();
    let mut proportions = vec![1.0 / k as f64; k];
    let floor = 1.0 / (10.0 * data.len() as f64);
    let mut labels: Option<Vec<usize>> = None;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..cfg.max_iters {
        iterations += 1;
        if let Some(l) = &labels {
            let mut sums = vec![vec![0.0; d]; k];
            let mut counts = vec![0usize; k];
            for (i, &c) in l.iter().enumerate() {
                counts[c] += 1;
                for (s, v) in sums[c].iter_mut().zip(&logs[i * d..(i + 1) * d]) {
                    *s += v;
                }
            }
            for j in 0..k {
                if counts[j] == 0 {
                    continue;
                }
                let mean_log: Vec<f64> = sums[j].iter().map(|s| s / counts[j] as f64).collect();
                let (mut p, _) = dirichlet_mle_from_mean_log(&mean_log, &models[j], cfg.mle)?;
                if cfg.unimodal {
                    p.alpha.iter_mut().for_each(|a| *a = a.max(UNIMODAL_FLOOR));
                }
                models[j] = p;
            }
        }
        let consts: Vec<f64> =
            models.iter().zip(&proportions).map(|(m, &p)| p.max(floor).ln() + m.log_normalizer()).collect();
        let next: Vec<usize> = logs
            .chunks_exact(d)
            .map(|lx| {
                let mut best = (0, f64::NEG_INFINITY);
                for (j, m) in models.iter().enumerate() {
                    let s = consts[j] + m.alpha.iter().zip(lx).map(|(a, v)| (a - 1.0) * v).sum::<f64>();
                    if s > best.1 {
                        best = (j, s);
                    }
                }
                best.0
            })
            .collect();
        let a = Assignment::new(next, k)?;
        proportions = a.counts().iter().map(|&c| c as f64 / data.len() as f64).collect();
        let stable = labels.as_deref() == Some(a.labels());
        labels = Some(a.into_labels());
        if stable {
            converged = true;
            break;
        }
    }
    let assignment = Assignment::new(labels.expect("at least one iteration"), k)?;
    Ok(KDirsOutcome { models, proportions, assignment, iterations, converged })
}
