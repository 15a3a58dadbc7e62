mod common;

use common::{random_tree, random_weights, rng};
use mmvnmf::collab::{
    collaborative_step, optimize_weights, run_algorithm, total_objective, CollaborationMode, CollaborationOptions,
    CollaborationWeights, ModalityData, MultiModalData, ViewData, ViewId, WeightKind,
};
use mmvnmf::data::{synth_multimodal, ModalitySpec, ViewSpec};
use mmvnmf::nmf::lee_seung_step;
use mmvnmf::NmfConfig;
use proptest::prelude::*;

fn three_views(seed: u64) -> MultiModalData {
    let specs = vec![
        ModalitySpec::new("a", vec![ViewSpec::new("a1", 6, 0.2), ViewSpec::new("a2", 5, 0.2).with_noise(0.5)]),
        ModalitySpec::new("b", vec![ViewSpec::new("b1", 4, 0.2)]),
    ];
    synth_multimodal(36, 3, &specs, seed).unwrap().data
}

#[test]
fn single_view_is_untouched_by_collaboration() {
    let data = three_views(1).select_modalities(&[1]).unwrap();
    let out = run_algorithm(&data, &NmfConfig::new(3).with_seed(2), &CollaborationOptions::default()).unwrap();
    assert_eq!(out.tree, out.local_tree);
    assert!(out.trace.components.is_empty());
}

#[test]
fn identical_views_with_identical_seeds_agree() {
    let x = three_views(2).view(ViewId::new(0, 0)).x.clone();
    let data = MultiModalData::new(vec![
        ModalityData::new("a", vec![ViewData::new("x", x.clone()).with_seed(9), ViewData::new("y", x.clone()).with_seed(9)]),
        ModalityData::new("b", vec![ViewData::new("z", x).with_seed(9)]),
    ])
    .unwrap();
    let out = run_algorithm(&data, &NmfConfig::new(3).with_seed(4), &CollaborationOptions::default()).unwrap();

    // No collaboration term contributes at the start.
    let start = &out.trace.components[0].rounds[0];
    let local: f64 = start.local_objectives.iter().sum();
    assert!((start.total_objective - local).abs() <= 1e-12 * local);

    // x and y play symmetric roles, so their updates are the same bits.
    // z sees the partner terms through a different weight layout, which
    // damps its multiplicative steps differently; it keeps the same
    // clustering without staying bit-identical.
    let (vx, vy, vz) = (ViewId::new(0, 0), ViewId::new(0, 1), ViewId::new(1, 0));
    assert_eq!(out.tree.view(vx).factors, out.tree.view(vy).factors);
    let assignments = out.tree.assignments();
    assert_eq!(assignments[0], assignments[2]);
    assert_eq!(out.local_tree.view(vz).factors, out.local_tree.view(vx).factors);
}

#[test]
fn multi_view_only_never_uses_gamma() {
    let out = run_algorithm(
        &three_views(3),
        &NmfConfig::new(3).with_seed(1),
        &CollaborationOptions::new(CollaborationMode::MultiViewOnly),
    )
    .unwrap();
    assert!(out.trace.final_weights.gamma.values().all(|&g| g == 0.0));
    // Modality b has a single view, so only modality a collaborates.
    assert_eq!(out.trace.components.len(), 1);
    assert_eq!(out.trace.components[0].modalities, vec![0]);
    assert_eq!(out.tree.view(ViewId::new(1, 0)), out.local_tree.view(ViewId::new(1, 0)));
}

#[test]
fn refreshed_weights_stay_normalized() {
    let out = run_algorithm(
        &three_views(4),
        &NmfConfig::new(3).with_seed(1).with_max_iter(30),
        &CollaborationOptions::default().with_refresh(true),
    )
    .unwrap();
    let w = &out.trace.final_weights;
    assert_eq!(w, &optimize_weights(&out.tree).unwrap());
    for kind in [WeightKind::Beta, WeightKind::Gamma] {
        for s in w.row_sums(kind).values() {
            assert!((s - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn disabled_mode_matches_local_phase() {
    let data = three_views(5);
    let cfg = NmfConfig::new(3).with_seed(8);
    let off = run_algorithm(&data, &cfg, &CollaborationOptions::new(CollaborationMode::Disabled)).unwrap();
    let on = run_algorithm(&data, &cfg, &CollaborationOptions::default()).unwrap();
    assert_eq!(off.tree, off.local_tree);
    assert_eq!(off.local_tree, on.local_tree);
    assert_ne!(on.tree, on.local_tree);
}

#[test]
fn zero_weights_step_is_lee_seung() {
    let mut r = rng(12);
    let tree = random_tree(&mut r, &[2, 1], 2, 7, 6);
    let zero = CollaborationWeights::zeros(&tree);
    for id in tree.view_ids() {
        let v = tree.view(id);
        let expected = lee_seung_step(&v.x, &v.factors, 1e-12).unwrap();
        assert_eq!(collaborative_step(id, &tree, &zero, 1e-12).unwrap(), expected);
    }
}

#[cfg(feature = "parallel")]
#[test]
fn results_do_not_depend_on_thread_count() {
    let data = three_views(6);
    let cfg = NmfConfig::new(3).with_seed(3).with_restarts(3).with_max_iter(80);
    let opts = CollaborationOptions::default();
    let pooled = run_algorithm(&data, &cfg, &opts).unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let alone = single.install(|| run_algorithm(&data, &cfg, &opts).unwrap());
    assert_eq!(pooled.tree, alone.tree);
    assert_eq!(pooled.trace.components, alone.trace.components);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn collaborative_steps_keep_factors_nonnegative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let tree = random_tree(&mut r, &[2, 2], 2, 6, 5);
        let w = random_weights(&mut r, &tree);
        for id in tree.view_ids() {
            let fp = collaborative_step(id, &tree, &w, 1e-12).unwrap();
            prop_assert!(fp.is_nonnegative());
            prop_assert!(fp.f.is_finite() && fp.g.is_finite());
        }
    }

    #[test]
    fn collaboration_ends_below_its_first_round(seed in 0u64..1000) {
        let out = run_algorithm(&three_views(seed), &NmfConfig::new(3).with_seed(seed).with_max_iter(60), &CollaborationOptions::default()).unwrap();
        for c in &out.trace.components {
            let t = c.total_objectives();
            prop_assert!(t.len() >= 2);
            prop_assert!(*t.last().unwrap() <= t[1]);
        }
        prop_assert!(total_objective(&out.tree, &out.trace.final_weights).unwrap().is_finite());
    }
}
