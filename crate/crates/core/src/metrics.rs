//! External cluster-validity indices: purity against known classes and the
//! silhouette index in a view's feature space.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Known class of each object next to its assigned cluster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledAssignment {
    labels: Vec<usize>,
    clusters: Vec<usize>,
}

impl LabeledAssignment {
    pub fn new(labels: Vec<usize>, clusters: Vec<usize>) -> Result<Self> {
        if labels.len() != clusters.len() {
            return Err(Error::Validation(format!(
                "{} labels but {} cluster assignments",
                labels.len(),
                clusters.len()
            )));
        }
        Ok(Self { labels, clusters })
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn clusters(&self) -> &[usize] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Fraction of objects that belong to the majority class of their cluster.
pub fn purity(a: &LabeledAssignment) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::Validation("purity of an empty assignment".into()));
    }
    let mut table: BTreeMap<usize, BTreeMap<usize, usize>> = BTreeMap::new();
    for (&class, &cluster) in a.labels.iter().zip(&a.clusters) {
        *table.entry(cluster).or_default().entry(class).or_insert(0) += 1;
    }
    let majority: usize = table
        .values()
        .map(|counts| counts.values().copied().max().unwrap_or(0))
        .sum();
    Ok(majority as f64 / a.len() as f64)
}

fn column_distance(x: &Matrix, i: usize, j: usize) -> f64 {
    (0..x.rows())
        .map(|m| {
            let d = x.get(m, i) - x.get(m, j);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Mean silhouette coefficient over all objects (columns of `x`), with
/// euclidean distances. Objects alone in their cluster score 0.
pub fn silhouette(x: &Matrix, clusters: &[usize]) -> Result<f64> {
    let n = x.cols();
    if clusters.len() != n {
        return Err(Error::Validation(format!(
            "{} cluster ids for {n} objects",
            clusters.len()
        )));
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &c) in clusters.iter().enumerate() {
        members.entry(c).or_default().push(i);
    }
    if members.len() < 2 {
        return Err(Error::UndefinedSilhouette(format!(
            "{} non-empty cluster(s) among {n} objects",
            members.len()
        )));
    }
    let groups: Vec<(usize, Vec<usize>)> = members.into_iter().collect();

    let scores = crate::par::map_range(n, |i| {
        let own = clusters[i];
        let mut a = 0.0;
        let mut b = f64::INFINITY;
        let mut own_size = 0;
        for (c, idx) in &groups {
            let sum: f64 = idx.iter().map(|&j| column_distance(x, i, j)).sum();
            if *c == own {
                own_size = idx.len();
                if own_size > 1 {
                    a = sum / (own_size - 1) as f64;
                }
            } else {
                b = b.min(sum / idx.len() as f64);
            }
        }
        let denom = a.max(b);
        if own_size <= 1 || denom == 0.0 {
            0.0
        } else {
            (b - a) / denom
        }
    });
    Ok(scores.iter().sum::<f64>() / n as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn purity_perfect_and_majority() {
        let a = LabeledAssignment::new(vec![0, 0, 1, 1, 2], vec![7, 7, 3, 3, 0]).unwrap();
        assert_eq!(purity(&a).unwrap(), 1.0);
        let a = LabeledAssignment::new(vec![0, 0, 1, 1], vec![0, 0, 0, 0]).unwrap();
        assert_eq!(purity(&a).unwrap(), 0.5);
    }

    #[test]
    fn purity_rejects_bad_input() {
        assert!(LabeledAssignment::new(vec![0], vec![0, 1]).is_err());
        let empty = LabeledAssignment::new(vec![], vec![]).unwrap();
        assert!(purity(&empty).is_err());
    }

    #[test]
    fn silhouette_four_points() {
        // columns: (0,0), (0,1), (10,0), (10,1)
        let x = Matrix::from_rows(&[[0.0, 0.0, 10.0, 10.0], [0.0, 1.0, 0.0, 1.0]]);
        let s = silhouette(&x, &[0, 0, 1, 1]).unwrap();
        // every point: a = 1, b = (10 + sqrt(101)) / 2
        let b = (10.0 + 101f64.sqrt()) / 2.0;
        let expected = (b - 1.0) / b;
        assert!((s - expected).abs() < 1e-12, "{s} vs {expected}");
        let swapped = silhouette(&x, &[0, 1, 0, 1]).unwrap();
        assert!(swapped < 0.0);
    }

    #[test]
    fn silhouette_single_cluster_is_an_error() {
        let x = Matrix::from_rows(&[[0.0, 1.0, 2.0]]);
        assert!(matches!(silhouette(&x, &[4, 4, 4]), Err(Error::UndefinedSilhouette(_))));
        assert!(silhouette(&x, &[0, 1]).is_err());
    }

    #[test]
    fn silhouette_singletons_score_zero() {
        let x = Matrix::from_rows(&[[0.0, 0.1, 5.0]]);
        let s = silhouette(&x, &[0, 0, 1]).unwrap();
        let b0 = 5.0;
        let b1 = 4.9;
        let expected = ((b0 - 0.1) / b0 + (b1 - 0.1) / b1 + 0.0) / 3.0;
        assert!((s - expected).abs() < 1e-12);
    }
}
