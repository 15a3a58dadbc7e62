#![allow(dead_code)]

use mmvnmf::collab::{Modality, ModalityTree, View};
use mmvnmf::{FactorPair, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn positive(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.random_range(0.1..1.0))
}

/// Random tree with `views_per_modality[p]` views in modality p, random
/// positive data and factors.
pub fn random_tree(rng: &mut ChaCha8Rng, views_per_modality: &[usize], k: usize, n: usize, max_m: usize) -> ModalityTree {
    let modalities = views_per_modality
        .iter()
        .enumerate()
        .map(|(p, &nv)| Modality {
            name: format!("m{p}"),
            views: (0..nv)
                .map(|v| {
                    let m = rng.random_range(k.max(2)..=max_m);
                    let x = positive(rng, m, n);
                    let f = positive(rng, m, k);
                    let g = positive(rng, k, n);
                    View {
                        name: format!("v{p}{v}"),
                        x,
                        factors: FactorPair::new(f, g).unwrap(),
                    }
                })
                .collect(),
        })
        .collect();
    ModalityTree::new(modalities).unwrap()
}

/// Random weights normalized per view (rows sum to 1).
pub fn random_weights(rng: &mut ChaCha8Rng, tree: &ModalityTree) -> mmvnmf::collab::CollaborationWeights {
    let mut w = mmvnmf::collab::CollaborationWeights::zeros(tree);
    for id in tree.view_ids() {
        let same = tree.same_modality_partners(id);
        let raw: Vec<f64> = same.iter().map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for (o, r) in same.into_iter().zip(raw) {
            w.beta.insert((id, o), r / total);
        }
        let distant = tree.distant_partners(id);
        let raw: Vec<f64> = distant.iter().map(|_| rng.random_range(0.1..1.0)).collect();
        let total: f64 = raw.iter().sum();
        for (o, r) in distant.into_iter().zip(raw) {
            w.gamma.insert((id, o), r / total);
        }
    }
    w
}

/// Compares an analytic gradient entry with a finite-difference estimate:
/// relative error below `rel`, or absolute error below `abs_floor` where
/// the gradient vanishes.
pub fn grad_close(analytic: f64, numeric: f64, rel: f64, abs_floor: f64) -> bool {
    let scale = analytic.abs().max(numeric.abs());
    if scale < abs_floor {
        (analytic - numeric).abs() < abs_floor
    } else {
        (analytic - numeric).abs() / scale < rel
    }
}
