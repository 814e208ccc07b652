//! k-sBetas: hard-assignment clustering with a product of sBeta marginals
//! per cluster.
//!
//! [`fit`] alternates three blocks on the objective
//! `-sum_i ln(pi_{u_i} g(x_i; theta_{u_i}))`:
//!
//! 1. parameters: per cluster and coordinate, a method-of-moments or
//!    maximum-likelihood estimate followed by [`constrain`] (skipped on the
//!    first iteration, which uses the vertex initialization);
//! 2. assignments: each point goes to the cluster maximizing
//!    `ln pi_k + ln g(x; theta_k)`, ties to the lowest index;
//! 3. proportions: `pi_k = n_k / N` (skipped for [`PiMode::Uniform`]).
//!
//! The loop stops when the assignment vector repeats or after
//! `max_iters` iterations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sbeta::{
    constrain, mle_from_stats, mom_estimate, params_from_mode_concentration, ConstraintConfig, MleOptions, SBeta,
    SBetaParams, SufficientStats, MOM_PARAM_FLOOR,
};
use crate::simplex::{Assignment, SimplexDataset};
use crate::special::ln_beta_unchecked;

/// Parameter estimator used in the parameter block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    Mom,
    Mle(MleOptions),
}

/// How the mixing proportions are handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PiMode {
    /// Proportions re-estimated from the assignments.
    Adaptive,
    /// Proportions fixed at 1/K (balanced-cluster prior).
    Uniform,
}

/// Initial cluster parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init {
    /// Cluster j peaks at the j-th simplex vertex.
    Vertex,
    /// Caller-supplied parameters, one entry per cluster.
    Params(Vec<SBetaParams>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterRunConfig {
    pub k: usize,
    pub delta: f64,
    pub constraints: ConstraintConfig,
    pub max_iters: usize,
    pub estimator: Estimator,
    pub pi_mode: PiMode,
    pub init: Init,
    /// Concentration of the vertex initialization; `None` means
    /// `tau_plus / 2`.
    pub init_concentration: Option<f64>,
}

impl ClusterRunConfig {
    /// Defaults: delta 0.15, tau in [1, 165], 25 iterations, method of
    /// moments, adaptive proportions, vertex initialization.
    pub fn new(k: usize) -> Self {
        Self {
            k,
            delta: 0.15,
            constraints: ConstraintConfig::default(),
            max_iters: 25,
            estimator: Estimator::Mom,
            pi_mode: PiMode::Adaptive,
            init: Init::Vertex,
            init_concentration: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be at least 1".into()));
        }
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return Err(Error::Config(format!("delta must be finite and non-negative, got {}", self.delta)));
        }
        self.constraints.validate()?;
        if let Estimator::Mle(o) = self.estimator {
            if o.max_iters == 0 || !(o.tol.is_finite() && o.tol > 0.0) {
                return Err(Error::Config("MLE needs max_iters >= 1 and tol > 0".into()));
            }
        }
        if let Some(l) = self.init_concentration {
            if !(l >= self.constraints.tau_minus && l <= self.constraints.tau_plus) {
                return Err(Error::Config(format!(
                    "initial concentration {l} outside [{}, {}]",
                    self.constraints.tau_minus, self.constraints.tau_plus
                )));
            }
        }
        if let Init::Params(p) = &self.init {
            if p.len() != self.k {
                return Err(Error::Config(format!("{} initial clusters supplied for k = {}", p.len(), self.k)));
            }
        }
        Ok(())
    }

    fn lambda0(&self) -> f64 {
        self.init_concentration.unwrap_or(self.constraints.tau_plus / 2.0)
    }
}

/// Fitted k-sBetas model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub clusters: Vec<SBetaParams>,
    /// Mixing proportions as estimated (exact zeros for empty clusters).
    pub proportions: Vec<f64>,
    pub delta: f64,
    pub constraints: ConstraintConfig,
    pub pi_mode: PiMode,
    /// Lower bound applied to proportions inside the logarithm.
    pub pi_floor: f64,
}

impl ClusterModel {
    pub fn k(&self) -> usize {
        self.clusters.len()
    }

    pub fn dim(&self) -> usize {
        self.clusters.first().map_or(0, |c| c.dim())
    }

    /// `ln pi_k` as used by assignments and the objective.
    pub fn log_prior(&self, k: usize) -> f64 {
        match self.pi_mode {
            PiMode::Uniform => -(self.k() as f64).ln(),
            PiMode::Adaptive => self.proportions[k].max(self.pi_floor).ln(),
        }
    }

    /// Per-cluster mode vectors, the cluster representatives for alignment.
    pub fn centroids(&self) -> Vec<Vec<f64>> {
        self.clusters.iter().map(|c| c.mode_vector()).collect()
    }
}

/// `ln(x + delta)` followed by `ln(1 + delta - x)` for every row, computed
/// once per dataset and offset.
struct LogTable {
    logs: Vec<f64>,
    finite: Vec<bool>,
    d: usize,
}

impl LogTable {
    fn new(data: &SimplexDataset, delta: f64) -> Self {
        let d = data.dim();
        let mut logs = Vec::with_capacity(2 * d * data.len());
        let mut finite = Vec::with_capacity(data.len());
        for x in data.rows() {
            let start = logs.len();
            logs.extend(x.iter().map(|v| (v + delta).ln()));
            logs.extend(x.iter().map(|v| (1.0 + delta - v).ln()));
            finite.push(logs[start..].iter().all(|l| l.is_finite()));
        }
        Self { logs, finite, d }
    }

    fn row(&self, i: usize) -> (&[f64], &[f64]) {
        let r = &self.logs[2 * self.d * i..2 * self.d * (i + 1)];
        r.split_at(self.d)
    }
}

/// Per-cluster constants for evaluating log-densities from a [`LogTable`].
struct Kernel {
    am1: Vec<f64>,
    bm1: Vec<f64>,
    constant: Vec<f64>,
    log_prior: Vec<f64>,
    d: usize,
}

impl Kernel {
    fn new(model: &ClusterModel) -> Self {
        let shift = (2.0 * model.delta).ln_1p();
        let mut am1 = Vec::new();
        let mut bm1 = Vec::new();
        let mut constant = Vec::with_capacity(model.k());
        for c in &model.clusters {
            am1.extend(c.alpha.iter().map(|a| a - 1.0));
            bm1.extend(c.beta.iter().map(|b| b - 1.0));
            constant.push(
                c.coords().map(|s| -ln_beta_unchecked(s.alpha, s.beta) - (s.alpha + s.beta - 2.0) * shift).sum(),
            );
        }
        let log_prior = (0..model.k()).map(|k| model.log_prior(k)).collect();
        Self { am1, bm1, constant, log_prior, d: model.dim() }
    }

    /// `ln pi_k + ln g(x_i; theta_k)`.
    fn score(&self, model: &ClusterModel, data: &SimplexDataset, table: &LogTable, i: usize, k: usize) -> f64 {
        let lp = if table.finite[i] {
            let (lo, hi) = table.row(i);
            let am1 = &self.am1[k * self.d..(k + 1) * self.d];
            let bm1 = &self.bm1[k * self.d..(k + 1) * self.d];
            let mut acc = self.constant[k];
            for n in 0..self.d {
                acc += am1[n] * lo[n] + bm1[n] * hi[n];
            }
            acc
        } else {
            model.clusters[k].log_pdf_unchecked(data.row(i))
        };
        self.log_prior[k] + lp
    }
}

fn check_dims(data: &SimplexDataset, model: &ClusterModel) -> Result<()> {
    if model.dim() != data.dim() {
        return Err(Error::Shape { expected: model.dim(), found: data.dim() });
    }
    Ok(())
}

fn vertex_cluster(j: usize, d: usize, lambda0: f64, delta: f64) -> SBetaParams {
    let coords: Vec<SBeta> = (0..d)
        .map(|n| {
            let mode = if n == j { 1.0 } else { 0.0 };
            params_from_mode_concentration(mode, lambda0, delta).expect("validated mode and concentration")
        })
        .collect();
    SBetaParams::from_coords(&coords, delta)
}

/// Cluster j gets, on every coordinate, the sBeta with mode `[n == j]` and
/// concentration `lambda0`; proportions start uniform. Needs `k <= d`.
pub fn vertex_init(
    k: usize,
    d: usize,
    delta: f64,
    constraints: ConstraintConfig,
    lambda0: Option<f64>,
) -> Result<ClusterModel> {
    let mut cfg = ClusterRunConfig::new(k);
    cfg.delta = delta;
    cfg.constraints = constraints;
    cfg.init_concentration = lambda0;
    cfg.validate()?;
    if k > d {
        return Err(Error::Config(format!("vertex initialization needs k <= d, got k = {k}, d = {d}")));
    }
    let lambda0 = cfg.lambda0();
    Ok(ClusterModel {
        clusters: (0..k).map(|j| vertex_cluster(j, d, lambda0, delta)).collect(),
        proportions: vec![1.0 / k as f64; k],
        delta,
        constraints,
        pi_mode: PiMode::Adaptive,
        pi_floor: 0.0,
    })
}

/// Assigns every point to `argmax_k ln pi_k + ln g(x; theta_k)`.
pub fn assign(data: &SimplexDataset, model: &ClusterModel) -> Result<Assignment> {
    check_dims(data, model)?;
    assign_with(data, &LogTable::new(data, model.delta), model)
}

fn assign_with(data: &SimplexDataset, table: &LogTable, model: &ClusterModel) -> Result<Assignment> {
    let kernel = Kernel::new(model);
    let mut labels = Vec::with_capacity(data.len());
    for i in 0..data.len() {
        let mut best = None;
        for k in 0..model.k() {
            let s = kernel.score(model, data, table, i, k);
            if s.is_finite() && best.is_none_or(|(_, b)| s > b) {
                best = Some((k, s));
            }
        }
        match best {
            Some((k, _)) => labels.push(k),
            None => return Err(Error::Assignment { point: i }),
        }
    }
    Assignment::new(labels, model.k())
}

/// `pi_k = n_k / N`.
pub fn update_proportions(a: &Assignment) -> Vec<f64> {
    let n = a.len() as f64;
    a.counts().into_iter().map(|c| if n > 0.0 { c as f64 / n } else { 0.0 }).collect()
}

/// Objective value `-sum_i [ln pi_{u_i} + ln g(x_i; theta_{u_i})]`.
pub fn objective(data: &SimplexDataset, model: &ClusterModel, a: &Assignment) -> Result<f64> {
    check_dims(data, model)?;
    if a.len() != data.len() {
        return Err(Error::Shape { expected: data.len(), found: a.len() });
    }
    Ok(objective_with(data, &LogTable::new(data, model.delta), model, a))
}

fn objective_with(data: &SimplexDataset, table: &LogTable, model: &ClusterModel, a: &Assignment) -> f64 {
    let kernel = Kernel::new(model);
    let mut total = 0.0;
    for (i, &l) in a.labels().iter().enumerate() {
        total -= kernel.score(model, data, table, i, l);
    }
    total
}

/// Population mean and variance of one coordinate over `members`, with
/// compensated summation in member order.
fn moments(data: &SimplexDataset, members: &[usize], n: usize) -> (f64, f64) {
    let count = members.len() as f64;
    let mean = neumaier(members.iter().map(|&i| data.row(i)[n])) / count;
    let var = neumaier(members.iter().map(|&i| {
        let d = data.row(i)[n] - mean;
        d * d
    })) / count;
    (mean, var)
}

fn neumaier(values: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn mom_coord(mean: f64, var: f64, delta: f64) -> Result<SBeta> {
    match mom_estimate(mean, var, delta) {
        Ok(e) => Ok(e.params),
        Err(Error::DegenerateEstimate { alpha, beta }) => Ok(SBeta {
            alpha: if alpha > 0.0 { alpha } else { MOM_PARAM_FLOOR },
            beta: if beta > 0.0 { beta } else { MOM_PARAM_FLOOR },
            delta,
        }),
        Err(e) => Err(e),
    }
}

fn estimate_cluster(
    data: &SimplexDataset,
    members: &[usize],
    delta: f64,
    estimator: Estimator,
) -> Result<SBetaParams> {
    let mut coords = Vec::with_capacity(data.dim());
    let mut column = Vec::new();
    for n in 0..data.dim() {
        let (mean, var) = moments(data, members, n);
        let mom = mom_coord(mean, var, delta)?;
        let est = match estimator {
            Estimator::Mom => mom,
            Estimator::Mle(opts) => {
                column.clear();
                column.extend(members.iter().map(|&i| data.row(i)[n]));
                let stats = SufficientStats::from_sample(&column, None, delta)?;
                mle_from_stats(&stats, delta, (mom.alpha, mom.beta), opts)?.params
            }
        };
        coords.push(est);
    }
    Ok(SBetaParams::from_coords(&coords, delta))
}

/// Vertex where the mixture of the given (non-empty) clusters has the least
/// density, skipping vertices in `taken` when possible.
fn emptiest_vertex(model: &ClusterModel, live: &[usize], taken: &[usize]) -> usize {
    let d = model.dim();
    let mut best: Option<(usize, f64)> = None;
    for n in 0..d {
        if taken.contains(&n) && taken.len() < d {
            continue;
        }
        let v = crate::simplex::vertex(n, d);
        let terms: Vec<f64> =
            live.iter().map(|&j| model.log_prior(j) + model.clusters[j].log_pdf_unchecked(&v)).collect();
        let mass = log_sum_exp(&terms);
        if best.is_none_or(|(_, m)| mass < m) {
            best = Some((n, mass));
        }
    }
    best.map_or(0, |(n, _)| n)
}

fn log_sum_exp(v: &[f64]) -> f64 {
    let m = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// Re-estimates every cluster from its members and constrains the result.
///
/// Empty clusters, and clusters whose estimator fails, are re-seeded with
/// the vertex-initialization density at the vertex where the current
/// mixture has the least mass. Proportions are carried over from `prev`.
pub fn update_params(
    data: &SimplexDataset,
    a: &Assignment,
    prev: &ClusterModel,
    cfg: &ClusterRunConfig,
) -> Result<ClusterModel> {
    check_dims(data, prev)?;
    if a.len() != data.len() || a.k() != prev.k() {
        return Err(Error::Shape { expected: data.len(), found: a.len() });
    }
    let members = a.members();
    let mut next = prev.clone();
    let mut failed = Vec::new();
    for (k, m) in members.iter().enumerate() {
        let est = if m.is_empty() {
            Err(Error::Domain("empty cluster".into()))
        } else {
            estimate_cluster(data, m, prev.delta, cfg.estimator)
        };
        match est {
            Ok(p) => next.clusters[k] = constrain(&p, &prev.constraints),
            Err(_) => failed.push(k),
        }
    }
    if !failed.is_empty() {
        let live: Vec<usize> = (0..prev.k()).filter(|k| !failed.contains(k)).collect();
        let mut taken = Vec::new();
        for &k in &failed {
            let n = emptiest_vertex(&next, &live, &taken);
            taken.push(n);
            next.clusters[k] = vertex_cluster(n, data.dim(), cfg.lambda0(), prev.delta);
        }
    }
    Ok(next)
}

/// Objective values recorded during one iteration of [`fit`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// After the parameter block, with the previous assignments and
    /// proportions (absent on the first iteration).
    pub after_params: Option<f64>,
    pub after_assign: f64,
    pub after_proportions: f64,
    /// Points whose label changed (all points on the first iteration).
    pub changed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOutcome {
    pub model: ClusterModel,
    pub assignment: Assignment,
    pub trace: Vec<IterationRecord>,
    pub iterations: usize,
    /// The assignments repeated before the iteration cap.
    pub converged: bool,
}

/// Runs k-sBetas on `data`.
pub fn fit(data: &SimplexDataset, cfg: &ClusterRunConfig) -> Result<FitOutcome> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Domain("empty dataset".into()));
    }
    if data.len() < cfg.k {
        return Err(Error::Config(format!("need at least k = {} points, got {}", cfg.k, data.len())));
    }
    let d = data.dim();
    let mut model = match &cfg.init {
        Init::Vertex => vertex_init(cfg.k, d, cfg.delta, cfg.constraints, Some(cfg.lambda0()))?,
        Init::Params(p) => {
            if let Some(bad) = p.iter().find(|c| c.dim() != d) {
                return Err(Error::Shape { expected: d, found: bad.dim() });
            }
            let clusters = p
                .iter()
                .map(|c| constrain(&SBetaParams { delta: cfg.delta, ..c.clone() }, &cfg.constraints))
                .collect();
            ClusterModel {
                clusters,
                proportions: vec![1.0 / cfg.k as f64; cfg.k],
                delta: cfg.delta,
                constraints: cfg.constraints,
                pi_mode: cfg.pi_mode,
                pi_floor: 0.0,
            }
        }
    };
    model.pi_mode = cfg.pi_mode;
    model.pi_floor = 1.0 / (10.0 * data.len() as f64);

    let table = LogTable::new(data, cfg.delta);
    let mut current: Option<Assignment> = None;
    let mut trace = Vec::new();
    let mut converged = false;
    for t in 0..cfg.max_iters {
        let mut after_params = None;
        if let Some(a) = &current {
            model = update_params(data, a, &model, cfg)?;
            after_params = Some(objective_with(data, &table, &model, a));
        }
        let next = assign_with(data, &table, &model)?;
        let after_assign = objective_with(data, &table, &model, &next);
        if cfg.pi_mode == PiMode::Adaptive {
            model.proportions = update_proportions(&next);
        }
        let after_proportions = objective_with(data, &table, &model, &next);
        let changed = match &current {
            Some(a) => a.labels().iter().zip(next.labels()).filter(|(x, y)| x != y).count(),
            None => data.len(),
        };
        trace.push(IterationRecord { iteration: t, after_params, after_assign, after_proportions, changed });
        let stable = current.is_some() && changed == 0;
        current = Some(next);
        if stable {
            converged = true;
            break;
        }
    }
    let assignment = current.ok_or_else(|| Error::Config("max_iters must be at least 1".into()))?;
    Ok(FitOutcome { model, assignment, iterations: trace.len(), trace, converged })
}
