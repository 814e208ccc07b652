//! Simplex datasets and hard assignments.

use crate::error::{Error, Result};

/// Maximum deviation of a row sum from 1 that is silently renormalized.
pub const SIMPLEX_TOL: f64 = 1e-5;

/// Floor used when pulling points off the simplex boundary.
pub const INTERIOR_EPS: f64 = 1e-9;

/// N points on the (D-1)-probability simplex, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexDataset {
    values: Vec<f64>,
    n: usize,
    d: usize,
}

impl SimplexDataset {
    /// Builds a dataset from rows, renormalizing each row to sum to one.
    ///
    /// Rows with a negative or non-finite entry, or whose sum is further than
    /// [`SIMPLEX_TOL`] from one, are rejected with their (0-based) index.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let d = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        let mut values = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != d {
                return Err(Error::Data {
                    row: i,
                    message: format!("expected {d} columns, found {}", row.len()),
                });
            }
            push_normalized(&mut values, row, i)?;
        }
        Ok(Self { values, n: rows.len(), d })
    }

    /// Builds a dataset from a row-major buffer of `n * d` values.
    pub fn from_flat(values: Vec<f64>, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Config("dimension must be at least 1".into()));
        }
        if !values.len().is_multiple_of(d) {
            return Err(Error::Shape { expected: d, found: values.len() % d });
        }
        let n = values.len() / d;
        let mut out = Vec::with_capacity(values.len());
        for (i, row) in values.chunks_exact(d).enumerate() {
            push_normalized(&mut out, row, i)?;
        }
        Ok(Self { values: out, n, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.d.max(1)).take(self.n)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.values
    }

    /// Copy of the dataset restricted to the given row indices, in order.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut values = Vec::with_capacity(indices.len() * self.d);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        Self { values, n: indices.len(), d: self.d }
    }

    /// Copy with every point mapped to `(x + eps) / (1 + D eps)`.
    pub fn interior(&self, eps: f64) -> Self {
        let mut values = self.values.clone();
        for row in values.chunks_exact_mut(self.d) {
            interior_project_in_place(row, eps);
        }
        Self { values, n: self.n, d: self.d }
    }
}

fn push_normalized(out: &mut Vec<f64>, row: &[f64], index: usize) -> Result<()> {
    if let Some(bad) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::Data { row: index, message: format!("invalid probability {bad}") });
    }
    let sum: f64 = row.iter().sum();
    if (sum - 1.0).abs() > SIMPLEX_TOL {
        return Err(Error::Data {
            row: index,
            message: format!("row sums to {sum}, not 1 (tolerance {SIMPLEX_TOL:e})"),
        });
    }
    out.extend(row.iter().map(|v| v / sum));
    Ok(())
}

/// Maps `x` to `(x + eps) / (1 + D eps)`, keeping it on the simplex.
pub fn interior_project_in_place(x: &mut [f64], eps: f64) {
    let denom = 1.0 + x.len() as f64 * eps;
    for v in x.iter_mut() {
        *v = (*v + eps) / denom;
    }
}

pub fn interior_project(x: &[f64], eps: f64) -> Vec<f64> {
    let mut out = x.to_vec();
    interior_project_in_place(&mut out, eps);
    out
}

/// The `j`-th vertex (one-hot vector) of the simplex in dimension `d`.
pub fn vertex(j: usize, d: usize) -> Vec<f64> {
    let mut v = vec![0.0; d];
    v[j] = 1.0;
    v
}

/// Hard point-to-cluster labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    labels: Vec<usize>,
    k: usize,
}

impl Assignment {
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some((i, &l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
            return Err(Error::Domain(format!("label {l} of point {i} is out of range for k = {k}")));
        }
        Ok(Self { labels, k })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Number of points in each cluster.
    pub fn counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.k];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Indices of the members of each cluster, in dataset order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            members[l].push(i);
        }
        members
    }

    pub fn into_labels(self) -> Vec<usize> {
        self.labels
    }
}

/// A dataset with ground-truth class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSimplexDataset {
    pub data: SimplexDataset,
    pub labels: Vec<usize>,
}

impl LabeledSimplexDataset {
    pub fn new(data: SimplexDataset, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != data.len() {
            return Err(Error::Shape { expected: data.len(), found: labels.len() });
        }
        Ok(Self { data, labels })
    }

    /// Number of distinct classes, taken as `max label + 1`.
    pub fn num_classes(&self) -> usize {
        self.labels.iter().max().map_or(0, |m| m + 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_are_renormalized() {
        let ds = SimplexDataset::from_rows(&[[0.2, 0.3, 0.500004]]).unwrap();
        let s: f64 = ds.row(0).iter().sum();
        assert!((s - 1.0).abs() < 1e-15);
    }

    #[test]
    fn off_simplex_rows_are_rejected_with_index() {
        let err = SimplexDataset::from_rows(&[vec![0.5, 0.5], vec![0.4, 0.5]]).unwrap_err();
        assert!(matches!(err, Error::Data { row: 1, .. }));
        let err = SimplexDataset::from_rows(&[vec![1.5, -0.5]]).unwrap_err();
        assert!(matches!(err, Error::Data { row: 0, .. }));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let err = SimplexDataset::from_rows(&[vec![0.5, 0.5], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::Data { row: 1, .. }));
    }

    #[test]
    fn interior_projection_stays_on_simplex() {
        let x = interior_project(&[1.0, 0.0, 0.0], 1e-9);
        assert!(x.iter().all(|&v| v > 0.0));
        assert!((x.iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn assignment_counts_and_range() {
        let a = Assignment::new(vec![0, 2, 2, 1], 3).unwrap();
        assert_eq!(a.counts(), vec![1, 1, 2]);
        assert_eq!(a.members()[2], vec![1, 2]);
        assert!(Assignment::new(vec![3], 3).is_err());
    }
}
