use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simplex::{interior_project, interior_project_in_place, vertex, Assignment, SimplexDataset, INTERIOR_EPS};

/// Value returned by [`kl_divergence`] when the divergence is infinite.
pub const SATURATED_DISTANCE: f64 = 1e300;

/// Cluster size above which the Hilbert prototype searches for the farthest
/// pair on an evenly spaced subsample of this many members.
pub const HILBERT_EXACT_LIMIT: usize = 2000;

/// Distortion measure and its prototype rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distortion {
    /// Squared Euclidean distance; mean prototype.
    Euclidean,
    /// L1 distance; coordinate-wise median prototype, renormalized.
    Manhattan,
    /// KL(x || theta); mean prototype, interior-projected.
    Kl,
    /// Hilbert simplex distance; midpoint of the farthest pair.
    Hilbert,
}

impl Distortion {
    pub fn distance(self, x: &[f64], theta: &[f64]) -> f64 {
        match self {
            Distortion::Euclidean => x.iter().zip(theta).map(|(a, b)| (a - b) * (a - b)).sum(),
            Distortion::Manhattan => x.iter().zip(theta).map(|(a, b)| (a - b).abs()).sum(),
            Distortion::Kl => kl_divergence(x, theta),
            Distortion::Hilbert => hilbert_distance(x, theta),
        }
    }

    /// Prototype of a non-empty set of member rows.
    pub fn prototype(self, data: &SimplexDataset, members: &[usize]) -> Vec<f64> {
        match self {
            Distortion::Euclidean => mean(data, members),
            Distortion::Kl => interior_project(&mean(data, members), INTERIOR_EPS),
            Distortion::Manhattan => median(data, members),
            Distortion::Hilbert => farthest_pair_midpoint(data, members),
        }
    }

    fn needs_interior(self) -> bool {
        matches!(self, Distortion::Hilbert)
    }
}

/// `sum_n x_n ln(x_n / theta_n)` with `0 ln 0 = 0`; [`SATURATED_DISTANCE`]
/// when some `theta_n = 0 < x_n`.
pub fn kl_divergence(x: &[f64], theta: &[f64]) -> f64 {
    let mut total = 0.0;
    for (&a, &b) in x.iter().zip(theta) {
        if a > 0.0 {
            if b <= 0.0 {
                return SATURATED_DISTANCE;
            }
            total += a * (a / b).ln();
        }
    }
    total.clamp(0.0, SATURATED_DISTANCE)
}

/// Hilbert simplex distance.
///
/// Along the line `x + t (theta - x)` the coordinate `n` hits zero at
/// `t_n = x_n / (x_n - theta_n)`. With `t0` the largest root `<= 0` and `t1`
/// the smallest root `>= 1`, the distance is `ln(1 - 1/t0) - ln(1 - 1/t1)`.
/// Since `1 - 1/t_n = theta_n / x_n`, this equals
/// `ln max_n(theta_n / x_n) - ln min_n(theta_n / x_n)`, which is how it is
/// evaluated. Points with a zero coordinate are interior-projected first.
pub fn hilbert_distance(x: &[f64], theta: &[f64]) -> f64 {
    if x.iter().chain(theta).any(|&v| v <= 0.0) {
        return hilbert_interior(&interior_project(x, INTERIOR_EPS), &interior_project(theta, INTERIOR_EPS));
    }
    hilbert_interior(x, theta)
}

fn hilbert_interior(x: &[f64], theta: &[f64]) -> f64 {
    let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
    for (&a, &b) in x.iter().zip(theta) {
        let r = (b / a).ln();
        hi = hi.max(r);
        lo = lo.min(r);
    }
    if hi < lo {
        return 0.0;
    }
    (hi - lo).max(0.0)
}

fn mean(data: &SimplexDataset, members: &[usize]) -> Vec<f64> {
    let mut out = vec![0.0; data.dim()];
    for &i in members {
        for (o, v) in out.iter_mut().zip(data.row(i)) {
            *o += v;
        }
    }
    let n = members.len() as f64;
    out.iter_mut().for_each(|o| *o /= n);
    out
}

fn median(data: &SimplexDataset, members: &[usize]) -> Vec<f64> {
    let mut column = Vec::with_capacity(members.len());
    let mut out = Vec::with_capacity(data.dim());
    for n in 0..data.dim() {
        column.clear();
        column.extend(members.iter().map(|&i| data.row(i)[n]));
        column.sort_by(f64::total_cmp);
        let m = column.len();
        out.push(if m % 2 == 1 { column[m / 2] } else { 0.5 * (column[m / 2 - 1] + column[m / 2]) });
    }
    let s: f64 = out.iter().sum();
    if s > 0.0 {
        out.iter_mut().for_each(|v| *v /= s);
        out
    } else {
        mean(data, members)
    }
}

fn farthest_pair_midpoint(data: &SimplexDataset, members: &[usize]) -> Vec<f64> {
    let pool: Vec<usize> = if members.len() > HILBERT_EXACT_LIMIT {
        (0..HILBERT_EXACT_LIMIT).map(|j| members[j * members.len() / HILBERT_EXACT_LIMIT]).collect()
    } else {
        members.to_vec()
    };
    let points: Vec<Vec<f64>> = pool.iter().map(|&i| interior_project(data.row(i), INTERIOR_EPS)).collect();
    let (mut best, mut pair) = (-1.0, (0, 0));
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            let d = hilbert_interior(&points[a], &points[b]);
            if d > best {
                best = d;
                pair = (a, b);
            }
        }
    }
    let mut mid: Vec<f64> = points[pair.0].iter().zip(&points[pair.1]).map(|(a, b)| 0.5 * (a + b)).collect();
    interior_project_in_place(&mut mid, INTERIOR_EPS);
    mid
}

/// The first `k` simplex vertices.
pub fn vertex_prototypes(k: usize, d: usize) -> Vec<Vec<f64>> {
    (0..k).map(|j| vertex(j, d)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansOutcome {
    pub prototypes: Vec<Vec<f64>>,
    pub assignment: Assignment,
    /// Objective `sum_i d(x_i, theta_{u_i})` after each full iteration.
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn nearest(distortion: Distortion, x: &[f64], prototypes: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, p) in prototypes.iter().enumerate() {
        let d = distortion.distance(x, p);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

fn prepare_prototype(distortion: Distortion, p: &[f64]) -> Vec<f64> {
    match distortion {
        Distortion::Kl | Distortion::Hilbert => interior_project(p, INTERIOR_EPS),
        _ => p.to_vec(),
    }
}

/// Alternates nearest-prototype assignment (ties to the lowest index) and
/// prototype updates until the labels repeat or `max_iters` assignments.
///
/// An empty cluster is re-seeded at the point farthest from its nearest
/// prototype.
pub fn distortion_kmeans(
    data: &SimplexDataset,
    k: usize,
    distortion: Distortion,
    init: &[Vec<f64>],
    max_iters: usize,
) -> Result<KMeansOutcome> {
    if k == 0 || init.len() != k {
        return Err(Error::Config(format!("need k >= 1 initial prototypes, got {} for k = {k}", init.len())));
    }
    if data.len() < k {
        return Err(Error::Config(format!("need at least k = {k} points, got {}", data.len())));
    }
    if max_iters == 0 {
        return Err(Error::Config("max_iters must be at least 1".into()));
    }
    if let Some(p) = init.iter().find(|p| p.len() != data.dim()) {
        return Err(Error::Shape { expected: data.dim(), found: p.len() });
    }
    let owned;
    let data = if distortion.needs_interior() {
        owned = data.interior(INTERIOR_EPS);
        &owned
    } else {
        data
    };
    let mut prototypes: Vec<Vec<f64>> = init.iter().map(|p| prepare_prototype(distortion, p)).collect();
    let mut labels: Option<Vec<usize>> = None;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..max_iters {
        iterations += 1;
        let next: Vec<usize> = data.rows().map(|x| nearest(distortion, x, &prototypes).0).collect();
        if labels.as_ref() == Some(&next) {
            converged = true;
            break;
        }
        let a = Assignment::new(next.clone(), k)?;
        for (j, m) in a.members().iter().enumerate() {
            if !m.is_empty() {
                prototypes[j] = distortion.prototype(data, m);
            }
        }
        for (j, m) in a.members().iter().enumerate() {
            if m.is_empty() {
                let far = (0..data.len())
                    .map(|i| (i, nearest(distortion, data.row(i), &prototypes).1))
                    .fold((0, f64::NEG_INFINITY), |b, c| if c.1 > b.1 { c } else { b });
                prototypes[j] = prepare_prototype(distortion, data.row(far.0));
            }
        }
        trace.push(data.rows().zip(&next).map(|(x, &l)| distortion.distance(x, &prototypes[l])).sum());
        labels = Some(next);
    }
    let labels = labels.expect("at least one iteration");
    Ok(KMeansOutcome { prototypes, assignment: Assignment::new(labels, k)?, objective_trace: trace, iterations, converged })
}
