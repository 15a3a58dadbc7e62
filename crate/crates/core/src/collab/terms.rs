//! Collaboration terms and the joint objective.

use crate::error::Result;
use crate::matrix::Matrix;
use crate::nmf::{local_objective, DataMatrix, PartitionMatrix};

use super::tree::{ModalityTree, Snapshot, ViewId};
use super::weights::CollaborationWeights;

/// Source of partner partitions: the live tree or a frozen snapshot.
pub trait Partitions {
    fn partition_of(&self, id: ViewId) -> &PartitionMatrix;
}

impl Partitions for ModalityTree {
    fn partition_of(&self, id: ViewId) -> &PartitionMatrix {
        self.partition(id)
    }
}

impl Partitions for Snapshot {
    fn partition_of(&self, id: ViewId) -> &PartitionMatrix {
        self.partition(id)
    }
}

/// K×N inner products between objects and prototypes: `D = FᵀX`.
pub fn distance_matrix(x: &DataMatrix, f: &Matrix) -> Result<Matrix> {
    f.tr_matmul(x)
}

/// Within-modality disagreement `‖(G − G') ∘ D‖²_F`.
pub fn multiview_term(g: &PartitionMatrix, g_other: &PartitionMatrix, d: &Matrix) -> Result<f64> {
    Ok(g.sub(g_other)?.hadamard(d)?.frobenius_sq())
}

/// Cross-modality disagreement `‖F(G − G')‖²_F`.
pub fn multimodal_term(f: &Matrix, g: &PartitionMatrix, g_distant: &PartitionMatrix) -> Result<f64> {
    Ok(f.matmul(&g.sub(g_distant)?)?.frobenius_sq())
}

/// Multi-view terms `C(v, v')` of one view against each same-modality
/// partner, in partner order.
pub fn multiview_terms<P: Partitions + ?Sized>(
    tree: &ModalityTree,
    id: ViewId,
    partners: &P,
) -> Result<Vec<(ViewId, f64)>> {
    let view = tree.view(id);
    let d = distance_matrix(&view.x, &view.factors.f)?;
    tree.same_modality_partners(id)
        .into_iter()
        .map(|other| Ok((other, multiview_term(&view.factors.g, partners.partition_of(other), &d)?)))
        .collect()
}

/// Multi-modal terms `O(v, q)` of one view against every distant view.
pub fn multimodal_terms<P: Partitions + ?Sized>(
    tree: &ModalityTree,
    id: ViewId,
    partners: &P,
) -> Result<Vec<(ViewId, f64)>> {
    let view = tree.view(id);
    tree.distant_partners(id)
        .into_iter()
        .map(|other| {
            Ok((
                other,
                multimodal_term(&view.factors.f, &view.factors.g, partners.partition_of(other))?,
            ))
        })
        .collect()
}

/// One view's share of the joint objective: its reconstruction error plus
/// its weighted multi-view and multi-modal terms, reading partner
/// partitions from `partners`.
pub fn view_objective_against<P: Partitions + ?Sized>(
    tree: &ModalityTree,
    id: ViewId,
    partners: &P,
    w: &CollaborationWeights,
) -> Result<f64> {
    let view = tree.view(id);
    let mut total = local_objective(&view.x, &view.factors)?;
    for (other, c) in multiview_terms(tree, id, partners)? {
        total += w.beta(id, other)? * c;
    }
    for (other, o) in multimodal_terms(tree, id, partners)? {
        total += w.gamma(id, other)? * o;
    }
    Ok(total)
}

/// One view's share of the joint objective on the live tree.
pub fn view_objective(tree: &ModalityTree, id: ViewId, w: &CollaborationWeights) -> Result<f64> {
    view_objective_against(tree, id, tree, w)
}

/// Joint objective: sum over all views of local error plus weighted
/// collaboration terms.
pub fn total_objective(tree: &ModalityTree, w: &CollaborationWeights) -> Result<f64> {
    tree.view_ids()
        .into_iter()
        .map(|id| view_objective(tree, id, w))
        .sum()
}

/// Joint objective with every view's partners read from a frozen snapshot.
/// Equals `total_objective` when the snapshot matches the tree; its
/// gradient with respect to one view's factors is the block gradient the
/// update rules follow.
pub fn snapshot_objective(tree: &ModalityTree, snapshot: &Snapshot, w: &CollaborationWeights) -> Result<f64> {
    tree.view_ids()
        .into_iter()
        .map(|id| view_objective_against(tree, id, snapshot, w))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_matrix_cases() {
        let x = Matrix::from_rows(&[[1.0, 2.0], [3.0, 4.0], [5.0, 6.0]]);
        assert_eq!(distance_matrix(&x, &Matrix::zeros(3, 2)).unwrap(), Matrix::zeros(2, 2));
        let e = Matrix::identity(3);
        assert_eq!(distance_matrix(&e, &e).unwrap(), Matrix::identity(3));
        let f = Matrix::from_rows(&[[0.5, 1.0], [0.25, 0.0], [2.0, 3.0]]);
        let d = distance_matrix(&x, &f).unwrap();
        for k in 0..2 {
            for n in 0..2 {
                let dot: f64 = (0..3).map(|m| x.get(m, n) * f.get(m, k)).sum();
                assert_eq!(d.get(k, n), dot);
            }
        }
        assert!(distance_matrix(&x, &Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn multiview_term_cases() {
        let g = Matrix::from_rows(&[[1.0, 0.0]]);
        let g2 = Matrix::from_rows(&[[0.0, 1.0]]);
        let d = Matrix::from_rows(&[[2.0, 3.0]]);
        assert_eq!(multiview_term(&g, &g, &d).unwrap(), 0.0);
        assert_eq!(multiview_term(&g, &g2, &Matrix::zeros(1, 2)).unwrap(), 0.0);
        assert_eq!(multiview_term(&g, &g2, &d).unwrap(), 13.0);
        let composed = g.sub(&g2).unwrap().hadamard(&d).unwrap().frobenius_sq();
        assert_eq!(composed, 13.0);
    }

    #[test]
    fn multimodal_term_cases() {
        let f = Matrix::from_rows(&[[1.0], [1.0]]);
        let g = Matrix::from_rows(&[[1.0, 0.0]]);
        let g2 = Matrix::from_rows(&[[0.0, 0.0]]);
        assert_eq!(multimodal_term(&f, &g, &g).unwrap(), 0.0);
        assert_eq!(multimodal_term(&Matrix::zeros(2, 1), &g, &g2).unwrap(), 0.0);
        assert_eq!(multimodal_term(&f, &g, &g2).unwrap(), 2.0);
    }
}
