//! Cluster-to-class alignment and evaluation metrics.

use serde::{Deserialize, Serialize};

use crate::baselines::argmax;
use crate::error::{Error, Result};
use crate::simplex::Assignment;

/// Minimum-cost perfect matching of rows to columns of an `n x m` cost
/// matrix with `n <= m` (Hungarian method with potentials, O(n^2 m)).
///
/// Returns the column chosen for each row and the total cost.
pub fn hungarian(cost: &[Vec<f64>]) -> Result<(Vec<usize>, f64)> {
    let n = cost.len();
    if n == 0 {
        return Ok((Vec::new(), 0.0));
    }
    let m = cost[0].len();
    if let Some(r) = cost.iter().find(|r| r.len() != m) {
        return Err(Error::Shape { expected: m, found: r.len() });
    }
    if n > m {
        return Err(Error::Config(format!("cannot match {n} rows into {m} columns")));
    }
    if cost.iter().flatten().any(|c| !c.is_finite()) {
        return Err(Error::Domain("assignment costs must be finite".into()));
    }
    // 1-based arrays; column 0 is a virtual column holding the current row.
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; m + 1];
    let mut owner = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![f64::INFINITY; m + 1];
        let mut used = vec![false; m + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut rows = vec![0; n];
    for j in 1..=m {
        if owner[j] != 0 {
            rows[owner[j] - 1] = j - 1;
        }
    }
    let total = rows.iter().enumerate().map(|(i, &j)| cost[i][j]).sum();
    Ok((rows, total))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlignMethod {
    Hungarian,
    Argmax,
}

/// Map from cluster index to class index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignmentMap {
    pub cluster_to_class: Vec<usize>,
    pub method: AlignMethod,
    /// Sum of centroid-to-vertex Euclidean distances under the map.
    pub total_cost: f64,
}

impl AlignmentMap {
    /// Class label of every point.
    pub fn apply(&self, a: &Assignment) -> Vec<usize> {
        a.labels().iter().map(|&l| self.cluster_to_class[l]).collect()
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.cluster_to_class.iter().max().map_or(0, |m| m + 1)];
        self.cluster_to_class.iter().all(|&c| !std::mem::replace(&mut seen[c], true))
    }
}

fn vertex_distance(centroid: &[f64], class: usize) -> f64 {
    centroid
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            let t = if n == class { 1.0 } else { 0.0 };
            (c - t) * (c - t)
        })
        .sum::<f64>()
        .sqrt()
}

/// Euclidean distance of every centroid to every one-hot class vector.
pub fn vertex_cost_matrix(centroids: &[Vec<f64>]) -> Vec<Vec<f64>> {
    centroids.iter().map(|c| (0..c.len()).map(|j| vertex_distance(c, j)).collect()).collect()
}

/// Bijection of K clusters onto D = K classes minimizing the total
/// centroid-to-one-hot Euclidean distance.
pub fn hungarian_align(centroids: &[Vec<f64>]) -> Result<AlignmentMap> {
    let k = centroids.len();
    if let Some(c) = centroids.iter().find(|c| c.len() != k) {
        return Err(Error::Config(format!("Hungarian alignment needs k = d, got k = {k}, d = {}", c.len())));
    }
    let (cluster_to_class, total_cost) = hungarian(&vertex_cost_matrix(centroids))?;
    Ok(AlignmentMap { cluster_to_class, method: AlignMethod::Hungarian, total_cost })
}

/// Each cluster goes to the largest coordinate of its centroid; several
/// clusters may share a class.
pub fn argmax_align(centroids: &[Vec<f64>]) -> AlignmentMap {
    let cluster_to_class: Vec<usize> = centroids.iter().map(|c| argmax(c)).collect();
    let total_cost = centroids.iter().zip(&cluster_to_class).map(|(c, &j)| vertex_distance(c, j)).sum();
    AlignmentMap { cluster_to_class, method: AlignMethod::Argmax, total_cost }
}

/// `table[a][b]` counts points with label `a` in the first labeling and `b`
/// in the second.
pub fn contingency(a: &[usize], b: &[usize]) -> Result<Vec<Vec<u64>>> {
    if a.len() != b.len() {
        return Err(Error::Shape { expected: a.len(), found: b.len() });
    }
    let ra = a.iter().max().map_or(0, |m| m + 1);
    let rb = b.iter().max().map_or(0, |m| m + 1);
    let mut t = vec![vec![0u64; rb]; ra];
    for (&x, &y) in a.iter().zip(b) {
        t[x][y] += 1;
    }
    Ok(t)
}

fn entropy(counts: impl Iterator<Item = u64>, n: f64) -> f64 {
    counts.filter(|&c| c > 0).map(|c| c as f64 / n).map(|p| -p * p.ln()).sum()
}

/// Normalized mutual information of a contingency table, with natural logs
/// and the arithmetic-mean normalizer `(H(A) + H(B)) / 2`. Two single-block
/// partitions score 1.
pub fn nmi_from_contingency(table: &[Vec<u64>]) -> f64 {
    let cols = table.iter().map(Vec::len).max().unwrap_or(0);
    let row_sums: Vec<u64> = table.iter().map(|r| r.iter().sum()).collect();
    let col_sums: Vec<u64> = (0..cols).map(|j| table.iter().map(|r| r.get(j).copied().unwrap_or(0)).sum()).collect();
    let n: u64 = row_sums.iter().sum();
    if n == 0 {
        return 1.0;
    }
    let nf = n as f64;
    let ha = entropy(row_sums.iter().copied(), nf);
    let hb = entropy(col_sums.iter().copied(), nf);
    if ha == 0.0 && hb == 0.0 {
        return 1.0;
    }
    let mut mi = 0.0;
    for (i, row) in table.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c > 0 {
                let c = c as f64;
                mi += c / nf * (c * nf / (row_sums[i] as f64 * col_sums[j] as f64)).ln();
            }
        }
    }
    (mi / (0.5 * (ha + hb))).clamp(0.0, 1.0)
}

pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    Ok(nmi_from_contingency(&contingency(a, b)?))
}

/// Fraction of positions where the labels agree.
pub fn accuracy(pred: &[usize], truth: &[usize]) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Shape { expected: truth.len(), found: pred.len() });
    }
    if pred.is_empty() {
        return Ok(1.0);
    }
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / pred.len() as f64)
}

/// `|pred = c and truth = c| / |pred = c or truth = c|`, or 1 when `c`
/// appears in neither.
pub fn iou(pred: &[usize], truth: &[usize], class: usize) -> Result<f64> {
    if pred.len() != truth.len() {
        return Err(Error::Shape { expected: truth.len(), found: pred.len() });
    }
    let (mut inter, mut union) = (0u64, 0u64);
    for (&p, &t) in pred.iter().zip(truth) {
        inter += u64::from(p == class && t == class);
        union += u64::from(p == class || t == class);
    }
    Ok(if union == 0 { 1.0 } else { inter as f64 / union as f64 })
}

/// Mean IoU over the classes `0..num_classes` present in either labeling.
pub fn mean_iou(pred: &[usize], truth: &[usize], num_classes: usize) -> Result<f64> {
    let mut sum = 0.0;
    let mut present = 0usize;
    for c in 0..num_classes {
        if pred.contains(&c) || truth.contains(&c) {
            sum += iou(pred, truth, c)?;
            present += 1;
        }
    }
    Ok(if present == 0 { 1.0 } else { sum / present as f64 })
}

/// Evaluation of one clustering against ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub nmi: f64,
    /// Accuracy of the aligned labels.
    pub accuracy: f64,
    /// IoU per class; 1 for classes absent from both labelings.
    pub per_class_iou: Vec<f64>,
    /// Mean over classes present in either labeling.
    pub mean_iou: f64,
    /// `confusion[k][c]`: points of cluster `k` with true class `c`.
    pub confusion: Vec<Vec<u64>>,
}

impl MetricReport {
    /// Metrics from the cluster-by-class confusion matrix and an alignment.
    pub fn from_confusion(confusion: Vec<Vec<u64>>, alignment: &AlignmentMap) -> Result<Self> {
        let k = confusion.len();
        if alignment.cluster_to_class.len() != k {
            return Err(Error::Shape { expected: k, found: alignment.cluster_to_class.len() });
        }
        let classes = confusion.first().map_or(0, Vec::len);
        let num_classes = classes.max(alignment.cluster_to_class.iter().max().map_or(0, |m| m + 1));
        let n: u64 = confusion.iter().flatten().sum();
        let mut correct = 0u64;
        let mut pred_count = vec![0u64; num_classes];
        let mut true_count = vec![0u64; num_classes];
        let mut inter = vec![0u64; num_classes];
        for (cl, row) in confusion.iter().enumerate() {
            let p = alignment.cluster_to_class[cl];
            for (t, &c) in row.iter().enumerate() {
                pred_count[p] += c;
                true_count[t] += c;
                if p == t {
                    inter[p] += c;
                    correct += c;
                }
            }
        }
        let mut per_class_iou = Vec::with_capacity(num_classes);
        let (mut sum, mut present) = (0.0, 0usize);
        for c in 0..num_classes {
            let union = pred_count[c] + true_count[c] - inter[c];
            if union == 0 {
                per_class_iou.push(1.0);
            } else {
                let v = inter[c] as f64 / union as f64;
                per_class_iou.push(v);
                sum += v;
                present += 1;
            }
        }
        Ok(Self {
            nmi: nmi_from_contingency(&confusion),
            accuracy: if n == 0 { 1.0 } else { correct as f64 / n as f64 },
            per_class_iou,
            mean_iou: if present == 0 { 1.0 } else { sum / present as f64 },
            confusion,
        })
    }

    /// Metrics of a clustering `a` against `truth` with classes
    /// `0..num_classes`.
    pub fn compute(a: &Assignment, truth: &[usize], num_classes: usize, alignment: &AlignmentMap) -> Result<Self> {
        if truth.len() != a.len() {
            return Err(Error::Shape { expected: a.len(), found: truth.len() });
        }
        if let Some(&t) = truth.iter().find(|&&t| t >= num_classes) {
            return Err(Error::Domain(format!("class {t} out of range for {num_classes} classes")));
        }
        let mut confusion = vec![vec![0u64; num_classes]; a.k()];
        for (&l, &t) in a.labels().iter().zip(truth) {
            confusion[l][t] += 1;
        }
        Self::from_confusion(confusion, alignment)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hungarian_small_cases() {
        let (rows, cost) = hungarian(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(rows, vec![0, 1]);
        assert_eq!(cost, 0.0);
        let (rows, cost) = hungarian(&[vec![4.0, 1.0, 3.0], vec![2.0, 0.0, 5.0], vec![3.0, 2.0, 2.0]]).unwrap();
        assert_eq!(rows, vec![1, 0, 2]);
        assert_eq!(cost, 5.0);
    }

    #[test]
    fn vertices_align_to_identity() {
        let c = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let h = hungarian_align(&c).unwrap();
        assert_eq!(h.cluster_to_class, vec![0, 1, 2]);
        assert_eq!(argmax_align(&c).cluster_to_class, h.cluster_to_class);
        assert!(hungarian_align(&[vec![0.5, 0.5]]).is_err());
    }

    #[test]
    fn argmax_align_allows_collisions() {
        let c = vec![vec![0.8, 0.2], vec![0.6, 0.4]];
        let a = argmax_align(&c);
        assert_eq!(a.cluster_to_class, vec![0, 0]);
        assert!(!a.is_bijective());
        assert_eq!(hungarian_align(&c).unwrap().cluster_to_class, vec![0, 1]);
    }

    #[test]
    fn nmi_examples() {
        assert!((nmi(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap() - 1.0).abs() < 1e-15);
        assert!(nmi(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap().abs() < 1e-15);
        // Table [[2, 0], [1, 1]].
        let ha = 2f64.ln();
        let hb = -(0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        let mi = 0.5 * (4.0f64 / 3.0).ln() + 0.25 * (2.0f64 / 3.0).ln() + 0.25 * 2f64.ln();
        let v = nmi(&[0, 0, 1, 1], &[0, 0, 0, 1]).unwrap();
        assert!((v - mi / (0.5 * (ha + hb))).abs() < 1e-14);
        assert_eq!(nmi(&[0, 0, 0], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(nmi(&[0, 0, 0], &[0, 1, 1]).unwrap(), 0.0);
    }

    #[test]
    fn accuracy_and_iou_examples() {
        assert_eq!(accuracy(&[0, 1], &[0, 1]).unwrap(), 1.0);
        assert_eq!(mean_iou(&[0, 1], &[0, 1], 2).unwrap(), 1.0);
        assert_eq!(accuracy(&[0, 0], &[1, 1]).unwrap(), 0.0);
        assert_eq!(mean_iou(&[0, 0], &[1, 1], 2).unwrap(), 0.0);
        let (p, t) = ([0, 0, 1], [0, 1, 1]);
        assert!((accuracy(&p, &t).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(iou(&p, &t, 0).unwrap(), 0.5);
        assert_eq!(iou(&p, &t, 1).unwrap(), 0.5);
        assert_eq!(iou(&p, &t, 2).unwrap(), 1.0);
        assert_eq!(mean_iou(&p, &t, 3).unwrap(), 0.5);
    }

    #[test]
    fn report_matches_direct_metrics() {
        let a = Assignment::new(vec![0, 0, 1, 2, 2, 1, 0], 3).unwrap();
        let truth = vec![1, 1, 0, 2, 2, 2, 0];
        let map = AlignmentMap { cluster_to_class: vec![1, 0, 2], method: AlignMethod::Hungarian, total_cost: 0.0 };
        let r = MetricReport::compute(&a, &truth, 3, &map).unwrap();
        let pred = map.apply(&a);
        assert_eq!(r.accuracy, accuracy(&pred, &truth).unwrap());
        assert_eq!(r.mean_iou, mean_iou(&pred, &truth, 3).unwrap());
        assert_eq!(r.nmi, nmi(a.labels(), &truth).unwrap());
        assert_eq!(r.confusion.iter().flatten().sum::<u64>(), 7);
    }
}
