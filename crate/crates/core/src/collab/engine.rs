//! Local phase followed by synchronous collaboration rounds.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::nmf::{has_converged, local_objective, run_local_nmf, NmfConfig, NmfFit};

use super::terms::total_objective;
use super::tree::{Modality, ModalityTree, MultiModalData, View, ViewId};
use super::update::collaborative_step;
use super::weights::{optimize_weights, CollaborationWeights};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollaborationMode {
    /// Local phase only.
    Disabled,
    /// Views collaborate within their modality; γ is held at zero.
    MultiViewOnly,
    /// Within- and cross-modality collaboration.
    #[default]
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CollaborationOptions {
    pub mode: CollaborationMode,
    /// Recompute β and γ after every round instead of once after the
    /// local phase.
    pub refresh_weights: bool,
}

impl CollaborationOptions {
    pub fn new(mode: CollaborationMode) -> Self {
        Self {
            mode,
            refresh_weights: false,
        }
    }

    pub fn with_refresh(mut self, refresh: bool) -> Self {
        self.refresh_weights = refresh;
        self
    }
}

/// Objectives recorded after one collaboration round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub total_objective: f64,
    /// Reconstruction error of each view of the component, in order.
    pub local_objectives: Vec<f64>,
}

/// Rounds of one independently converging group of modalities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentTrace {
    pub modalities: Vec<usize>,
    /// Entry 0 is the state after the local phase; entry r is after round r.
    pub rounds: Vec<RoundRecord>,
    pub converged: bool,
}

impl ComponentTrace {
    pub fn total_objectives(&self) -> Vec<f64> {
        self.rounds.iter().map(|r| r.total_objective).collect()
    }

    pub fn n_rounds(&self) -> usize {
        self.rounds.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentTrace {
    /// Local-phase fit of each view, in `view_ids` order.
    pub local: Vec<NmfFit>,
    pub components: Vec<ComponentTrace>,
    /// Weights computed from the local-phase factors.
    pub initial_weights: CollaborationWeights,
    /// Weights in force after the last round.
    pub final_weights: CollaborationWeights,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmOutput {
    /// Factors right after the local phase.
    pub local_tree: ModalityTree,
    /// Factors after collaboration.
    pub tree: ModalityTree,
    pub trace: ExperimentTrace,
}

/// Seed used for the view at flat position `index` under experiment seed
/// `base` (splitmix64 of the pair).
pub fn view_seed(base: u64, index: usize) -> u64 {
    let mut z = base.wrapping_add((index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Local NMF on every view, independently.
pub fn local_phase(data: &MultiModalData, cfg: &NmfConfig) -> Result<(ModalityTree, Vec<NmfFit>)> {
    data.validate()?;
    let ids = data.view_ids();
    let fits = crate::par::map_range(ids.len(), |index| {
        let view = data.view(ids[index]);
        let seed = view.seed.unwrap_or_else(|| view_seed(cfg.seed, index));
        run_local_nmf(&view.x, &NmfConfig { seed, ..cfg.clone() })
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;

    let mut fit_iter = fits.iter();
    let modalities = data
        .modalities
        .iter()
        .map(|m| Modality {
            name: m.name.clone(),
            views: m
                .views
                .iter()
                .map(|v| View {
                    name: v.name.clone(),
                    x: v.x.clone(),
                    factors: fit_iter.next().unwrap().factors.clone(),
                })
                .collect(),
        })
        .collect();
    Ok((ModalityTree::new(modalities)?, fits))
}

fn component_groups(tree: &ModalityTree, mode: CollaborationMode) -> Vec<Vec<usize>> {
    let p = tree.modalities().len();
    match mode {
        CollaborationMode::Disabled => Vec::new(),
        CollaborationMode::MultiViewOnly => (0..p).map(|i| vec![i]).collect(),
        CollaborationMode::Full => vec![(0..p).collect()],
    }
}

fn local_objectives(tree: &ModalityTree) -> Result<Vec<f64>> {
    tree.view_ids()
        .into_iter()
        .map(|id| {
            let v = tree.view(id);
            local_objective(&v.x, &v.factors)
        })
        .collect()
}

/// Synchronous collaboration rounds on one tree whose views all interact.
/// Returns the final tree, the trace and the weights in force at the end.
pub fn collaborate_rounds(
    mut tree: ModalityTree,
    mut weights: CollaborationWeights,
    cfg: &NmfConfig,
    refresh_weights: bool,
) -> Result<(ModalityTree, Vec<RoundRecord>, bool, CollaborationWeights)> {
    let ids = tree.view_ids();
    let mut rounds = vec![RoundRecord {
        total_objective: total_objective(&tree, &weights)?,
        local_objectives: local_objectives(&tree)?,
    }];
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        let snapshot = &tree;
        let updated = crate::par::map_slice(&ids, |&id| collaborative_step(id, snapshot, &weights, cfg.eps))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        tree.set_factors(updated)?;
        if refresh_weights {
            weights = optimize_weights(&tree)?;
        }
        let prev = rounds.last().unwrap().total_objective;
        let current = total_objective(&tree, &weights)?;
        rounds.push(RoundRecord {
            total_objective: current,
            local_objectives: local_objectives(&tree)?,
        });
        if has_converged(prev, current, cfg.rel_tol, cfg.eps) {
            converged = true;
            break;
        }
    }
    Ok((tree, rounds, converged, weights))
}

/// Collaboration phase on a factorized tree. Groups of modalities that do
/// not interact under `opts.mode` run and converge independently.
pub fn collaborate(
    tree: &ModalityTree,
    cfg: &NmfConfig,
    opts: &CollaborationOptions,
) -> Result<(ModalityTree, Vec<ComponentTrace>, CollaborationWeights, CollaborationWeights)> {
    cfg.validate()?;
    let mut initial = CollaborationWeights::zeros(tree);
    let mut last = initial.clone();
    let mut out = tree.clone();
    let mut traces = Vec::new();

    for group in component_groups(tree, opts.mode) {
        let sub = tree.select_modalities(&group)?;
        let weights = optimize_weights(&sub)?;
        initial.merge_remapped(&weights, &group);
        if !sub.has_partners() {
            last.merge_remapped(&weights, &group);
            continue;
        }
        let (sub, rounds, converged, final_weights) =
            collaborate_rounds(sub, weights, cfg, opts.refresh_weights)?;
        last.merge_remapped(&final_weights, &group);
        for (local_p, &p) in group.iter().enumerate() {
            for (v, view) in sub.modalities()[local_p].views.iter().enumerate() {
                out.view_mut(ViewId::new(p, v)).factors = view.factors.clone();
            }
        }
        traces.push(ComponentTrace {
            modalities: group,
            rounds,
            converged,
        });
    }
    Ok((out, traces, initial, last))
}

/// Local phase, weight optimization and collaboration rounds.
pub fn run_algorithm(
    data: &MultiModalData,
    cfg: &NmfConfig,
    opts: &CollaborationOptions,
) -> Result<AlgorithmOutput> {
    cfg.validate()?;
    let (local_tree, local) = local_phase(data, cfg)?;
    let (tree, components, initial_weights, final_weights) = collaborate(&local_tree, cfg, opts)?;
    Ok(AlgorithmOutput {
        local_tree,
        tree,
        trace: ExperimentTrace {
            local,
            components,
            initial_weights,
            final_weights,
        },
    })
}
