//! Finite-difference checks of the gradient splits used by the
//! collaborative multiplicative updates.

mod common;

use common::{grad_close, random_tree, random_weights, rng};
use mmvnmf::collab::{
    gradient_split_f, gradient_split_g, snapshot_objective, total_objective, CollaborationWeights, ModalityTree,
    Snapshot, ViewId,
};
use mmvnmf::Matrix;

const STEP: f64 = 1e-6;

/// Central difference of `objective` with respect to one factor entry of
/// one view. `which` selects F (true) or G (false).
fn central_difference(
    tree: &ModalityTree,
    id: ViewId,
    f_entry: bool,
    (i, j): (usize, usize),
    objective: impl Fn(&ModalityTree) -> f64,
) -> f64 {
    let mut plus = tree.clone();
    let mut minus = tree.clone();
    {
        let fp = &mut plus.view_mut(id).factors;
        let m = if f_entry { &mut fp.f } else { &mut fp.g };
        m.set(i, j, m.get(i, j) + STEP);
    }
    {
        let fp = &mut minus.view_mut(id).factors;
        let m = if f_entry { &mut fp.f } else { &mut fp.g };
        m.set(i, j, m.get(i, j) - STEP);
    }
    (objective(&plus) - objective(&minus)) / (2.0 * STEP)
}

fn assert_split_matches(
    tree: &ModalityTree,
    w: &CollaborationWeights,
    id: ViewId,
    f_entry: bool,
    objective: &dyn Fn(&ModalityTree) -> f64,
) {
    let (pos, neg) = if f_entry {
        gradient_split_f(id, tree, w).unwrap()
    } else {
        gradient_split_g(id, tree, w).unwrap()
    };
    let grad = pos.sub(&neg).unwrap().scale(2.0);
    for i in 0..grad.rows() {
        for j in 0..grad.cols() {
            let numeric = central_difference(tree, id, f_entry, (i, j), objective);
            assert!(
                grad_close(grad.get(i, j), numeric, 1e-5, 1e-8),
                "view {id} {} entry ({i},{j}): analytic {} vs numeric {numeric}",
                if f_entry { "F" } else { "G" },
                grad.get(i, j)
            );
        }
    }
}

#[test]
fn splits_match_finite_differences() {
    let mut r = rng(2024);
    for _ in 0..10 {
        let tree = random_tree(&mut r, &[2, 2], 2, 6, 5);
        let w = random_weights(&mut r, &tree);
        let snapshot = Snapshot::of(&tree);
        for id in tree.view_ids() {
            assert_split_matches(&tree, &w, id, false, &|t| snapshot_objective(t, &snapshot, &w).unwrap());
            // No partner's terms depend on this view's F, so the full joint
            // objective applies directly.
            assert_split_matches(&tree, &w, id, true, &|t| total_objective(t, &w).unwrap());
        }
    }
}

#[test]
fn snapshot_objective_equals_total_at_the_snapshot() {
    let mut r = rng(5);
    let tree = random_tree(&mut r, &[3, 1, 2], 3, 7, 6);
    let w = random_weights(&mut r, &tree);
    let a = snapshot_objective(&tree, &Snapshot::of(&tree), &w).unwrap();
    let b = total_objective(&tree, &w).unwrap();
    assert_eq!(a, b);
}

#[test]
fn zero_weights_reduce_to_lee_seung_split() {
    let mut r = rng(6);
    let tree = random_tree(&mut r, &[2, 2], 2, 6, 5);
    let w = CollaborationWeights::zeros(&tree);
    let id = ViewId::new(1, 0);
    let v = tree.view(id);
    let (f, g, x) = (&v.factors.f, &v.factors.g, &v.x);
    let (pos, neg) = gradient_split_g(id, &tree, &w).unwrap();
    assert_eq!(pos, f.transpose().matmul(f).unwrap().matmul(g).unwrap());
    assert_eq!(neg, f.transpose().matmul(x).unwrap());
    let (pos, neg) = gradient_split_f(id, &tree, &w).unwrap();
    assert_eq!(pos, f.matmul(&g.matmul(&g.transpose()).unwrap()).unwrap());
    assert_eq!(neg, x.matmul(&g.transpose()).unwrap());
}

fn with_shared_partition(mut tree: ModalityTree, g: &Matrix) -> ModalityTree {
    for id in tree.view_ids() {
        tree.view_mut(id).factors.g = g.clone();
    }
    tree
}

#[test]
fn agreeing_partners_cancel() {
    let mut r = rng(8);
    let tree = random_tree(&mut r, &[2, 2], 2, 6, 5);
    let w = random_weights(&mut r, &tree);
    let shared = tree.view(ViewId::new(0, 0)).factors.g.clone();
    let tree = with_shared_partition(tree, &shared);
    let zero = CollaborationWeights::zeros(&tree);
    for id in tree.view_ids() {
        let (pos, neg) = gradient_split_g(id, &tree, &w).unwrap();
        let (pos0, neg0) = gradient_split_g(id, &tree, &zero).unwrap();
        let extra_pos = pos.sub(&pos0).unwrap();
        let extra_neg = neg.sub(&neg0).unwrap();
        for (a, b) in extra_pos.as_slice().iter().zip(extra_neg.as_slice()) {
            assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
        }
        let (pos, neg) = gradient_split_f(id, &tree, &w).unwrap();
        let (pos0, neg0) = gradient_split_f(id, &tree, &zero).unwrap();
        let diff = pos.sub(&neg).unwrap().sub(&pos0.sub(&neg0).unwrap()).unwrap();
        assert!(diff.frobenius_sq().sqrt() <= 1e-10 * pos.frobenius_sq().sqrt());
    }
}
