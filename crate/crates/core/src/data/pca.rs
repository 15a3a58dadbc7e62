//! PCA over features (rows) with a per-component shift that restores
//! non-negativity of the projected scores.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Fitted principal directions of a feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Pca {
    /// d×M, one unit direction per row, by decreasing variance.
    pub components: Matrix,
    /// Feature means subtracted before projection.
    pub means: Vec<f64>,
    pub eigenvalues: Vec<f64>,
}

impl Pca {
    /// Top `target_dim` directions of the covariance of `x` (M features ×
    /// N objects). Each direction is oriented so that its largest-magnitude
    /// loading is positive.
    pub fn fit(x: &Matrix, target_dim: usize) -> Result<Self> {
        let (m, n) = x.shape();
        if target_dim == 0 || target_dim > m.min(n) {
            return Err(Error::Config(format!(
                "PCA target dimension {target_dim} must be in 1..={} for a {m}x{n} matrix",
                m.min(n)
            )));
        }
        let means: Vec<f64> = (0..m).map(|i| x.row(i).iter().sum::<f64>() / n as f64).collect();
        let centered = DMatrix::from_fn(m, n, |i, j| x.get(i, j) - means[i]);
        let denom = (n.max(2) - 1) as f64;
        let cov = (&centered * centered.transpose()) / denom;
        let eigen = SymmetricEigen::new(cov);

        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]).then(a.cmp(&b)));

        let mut components = Matrix::zeros(target_dim, m);
        let mut eigenvalues = Vec::with_capacity(target_dim);
        for (row, &idx) in order.iter().take(target_dim).enumerate() {
            let v = eigen.eigenvectors.column(idx);
            let mut lead = 0;
            for i in 1..m {
                if v[i].abs() > v[lead].abs() {
                    lead = i;
                }
            }
            let sign = if v[lead] < 0.0 { -1.0 } else { 1.0 };
            for i in 0..m {
                components.set(row, i, sign * v[i]);
            }
            eigenvalues.push(eigen.eigenvalues[idx]);
        }
        Ok(Self {
            components,
            means,
            eigenvalues,
        })
    }

    /// Signed scores, d×N.
    pub fn project(&self, x: &Matrix) -> Result<Matrix> {
        if x.rows() != self.means.len() {
            return Err(Error::ShapeMismatch {
                op: "pca project",
                left: self.components.shape(),
                right: x.shape(),
            });
        }
        let centered = Matrix::from_fn(x.rows(), x.cols(), |i, j| x.get(i, j) - self.means[i]);
        self.components.matmul(&centered)
    }
}

/// Projects onto the top `target_dim` principal directions, then shifts
/// each output row by its minimum so every entry is ≥ 0.
pub fn pca_nonneg(x: &Matrix, target_dim: usize) -> Result<Matrix> {
    let scores = Pca::fit(x, target_dim)?.project(x)?;
    Ok(shift_rows_to_zero(&scores))
}

pub(crate) fn shift_rows_to_zero(m: &Matrix) -> Matrix {
    let mins: Vec<f64> = (0..m.rows())
        .map(|i| m.row(i).iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    Matrix::from_fn(m.rows(), m.cols(), |i, j| m.get(i, j) - mins[i])
}
