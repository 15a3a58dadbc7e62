//! Gradient splits of one view's share of the joint objective and the
//! multiplicative step built from them.
//!
//! Partner partitions are constants inside a view's gradient. Each split
//! returns `(pos, neg)` with `pos − neg` equal to half the gradient; the
//! update `Θ ← Θ ∘ neg / pos` is the adaptive-rate gradient step
//! `Θ − (Θ / pos) ∘ (pos − neg)`.

use crate::error::Result;
use crate::matrix::Matrix;
use crate::nmf::{reconstruction_split_f, reconstruction_split_g, FactorPair};

use super::terms::distance_matrix;
use super::tree::{ModalityTree, ViewId};
use super::weights::CollaborationWeights;

struct Partner<'a> {
    weight: f64,
    g: &'a Matrix,
}

struct Partners<'a> {
    same: Vec<Partner<'a>>,
    distant: Vec<Partner<'a>>,
}

fn partners<'a>(tree: &'a ModalityTree, id: ViewId, w: &CollaborationWeights) -> Result<Partners<'a>> {
    let same = tree
        .same_modality_partners(id)
        .into_iter()
        .map(|o| {
            Ok(Partner {
                weight: w.beta(id, o)?,
                g: tree.partition(o),
            })
        })
        .collect::<Result<_>>()?;
    let distant = tree
        .distant_partners(id)
        .into_iter()
        .map(|o| {
            Ok(Partner {
                weight: w.gamma(id, o)?,
                g: tree.partition(o),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Partners { same, distant })
}

fn split_g(x: &Matrix, f: &Matrix, g: &Matrix, p: &Partners<'_>) -> Result<(Matrix, Matrix)> {
    let (mut pos, mut neg) = reconstruction_split_g(x, f, g)?;
    if !p.same.is_empty() {
        let d = distance_matrix(x, f)?;
        let d2 = d.hadamard(&d)?;
        let own = g.hadamard(&d2)?;
        for partner in &p.same {
            pos.add_scaled_assign(partner.weight, &own)?;
            neg.add_scaled_assign(partner.weight, &partner.g.hadamard(&d2)?)?;
        }
    }
    if !p.distant.is_empty() {
        let ftf = f.tr_matmul(f)?;
        let own = ftf.matmul(g)?;
        for partner in &p.distant {
            pos.add_scaled_assign(partner.weight, &own)?;
            neg.add_scaled_assign(partner.weight, &ftf.matmul(partner.g)?)?;
        }
    }
    Ok((pos, neg))
}

fn split_f(x: &Matrix, f: &Matrix, g: &Matrix, p: &Partners<'_>) -> Result<(Matrix, Matrix)> {
    let (mut pos, mut neg) = reconstruction_split_f(x, f, g)?;
    if !p.same.is_empty() {
        let d = distance_matrix(x, f)?;
        for partner in &p.same {
            let diff = g.sub(partner.g)?;
            let weighted = diff.hadamard(&diff)?.hadamard(&d)?;
            pos.add_scaled_assign(partner.weight, &x.matmul_tr(&weighted)?)?;
        }
    }
    if !p.distant.is_empty() {
        let ggt = g.matmul_tr(g)?;
        for partner in &p.distant {
            let gq = partner.g;
            let pos_inner = ggt.add(&gq.matmul_tr(gq)?)?;
            let neg_inner = g.matmul_tr(gq)?.add(&gq.matmul_tr(g)?)?;
            pos.add_scaled_assign(partner.weight, &f.matmul(&pos_inner)?)?;
            neg.add_scaled_assign(partner.weight, &f.matmul(&neg_inner)?)?;
        }
    }
    Ok((pos, neg))
}

/// `(pos, neg)` parts of ½∇_G of the view's share of the joint objective.
pub fn gradient_split_g(id: ViewId, tree: &ModalityTree, w: &CollaborationWeights) -> Result<(Matrix, Matrix)> {
    let view = tree.view(id);
    split_g(&view.x, &view.factors.f, &view.factors.g, &partners(tree, id, w)?)
}

/// `(pos, neg)` parts of ½∇_F of the view's share of the joint objective,
/// including the dependence of the distance matrix on F.
pub fn gradient_split_f(id: ViewId, tree: &ModalityTree, w: &CollaborationWeights) -> Result<(Matrix, Matrix)> {
    let view = tree.view(id);
    split_f(&view.x, &view.factors.f, &view.factors.g, &partners(tree, id, w)?)
}

/// One collaborative multiplicative update of a view against the round's
/// snapshot `tree`: G first, then F with splits recomputed at the new G.
pub fn collaborative_step(
    id: ViewId,
    tree: &ModalityTree,
    w: &CollaborationWeights,
    eps: f64,
) -> Result<FactorPair> {
    let view = tree.view(id);
    let p = partners(tree, id, w)?;
    let (x, f) = (&view.x, &view.factors.f);
    let (pos, neg) = split_g(x, f, &view.factors.g, &p)?;
    let g = view.factors.g.hadamard(&neg.safe_divide(&pos, eps)?)?;
    let (pos, neg) = split_f(x, f, &g, &p)?;
    let f = f.hadamard(&neg.safe_divide(&pos, eps)?)?;
    Ok(FactorPair { f, g })
}
