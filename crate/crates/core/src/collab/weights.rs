//! Collaboration weights β (within a modality) and γ (across modalities).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::terms::{multimodal_terms, multiview_terms};
use super::tree::{ModalityTree, ViewId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightKind {
    Beta,
    Gamma,
}

/// Flat form of one weight, used in reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightEntry {
    pub kind: WeightKind,
    pub from: ViewId,
    pub to: ViewId,
    pub weight: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CollaborationWeights {
    pub beta: BTreeMap<(ViewId, ViewId), f64>,
    pub gamma: BTreeMap<(ViewId, ViewId), f64>,
}

impl CollaborationWeights {
    pub fn beta(&self, from: ViewId, to: ViewId) -> Result<f64> {
        lookup(&self.beta, from, to)
    }

    pub fn gamma(&self, from: ViewId, to: ViewId) -> Result<f64> {
        lookup(&self.gamma, from, to)
    }

    /// All pairs of the tree present with weight zero.
    pub fn zeros(tree: &ModalityTree) -> Self {
        let mut w = Self::default();
        for id in tree.view_ids() {
            for other in tree.same_modality_partners(id) {
                w.beta.insert((id, other), 0.0);
            }
            for other in tree.distant_partners(id) {
                w.gamma.insert((id, other), 0.0);
            }
        }
        w
    }

    /// Same β, every γ forced to zero.
    pub fn without_gamma(mut self) -> Self {
        self.gamma.values_mut().for_each(|g| *g = 0.0);
        self
    }

    /// Sum of each view's outgoing weights of one kind.
    pub fn row_sums(&self, kind: WeightKind) -> BTreeMap<ViewId, f64> {
        let map = match kind {
            WeightKind::Beta => &self.beta,
            WeightKind::Gamma => &self.gamma,
        };
        let mut sums = BTreeMap::new();
        for (&(from, _), &w) in map {
            *sums.entry(from).or_insert(0.0) += w;
        }
        sums
    }

    /// Copies every entry of `other` over this set of weights, remapping
    /// modality indices through `modality_map`.
    pub(crate) fn merge_remapped(&mut self, other: &CollaborationWeights, modality_map: &[usize]) {
        let remap = |id: ViewId| ViewId::new(modality_map[id.modality], id.view);
        for (&(a, b), &w) in &other.beta {
            self.beta.insert((remap(a), remap(b)), w);
        }
        for (&(a, b), &w) in &other.gamma {
            self.gamma.insert((remap(a), remap(b)), w);
        }
    }

    pub fn entries(&self) -> Vec<WeightEntry> {
        let beta = self.beta.iter().map(|(&(from, to), &weight)| WeightEntry {
            kind: WeightKind::Beta,
            from,
            to,
            weight,
        });
        let gamma = self.gamma.iter().map(|(&(from, to), &weight)| WeightEntry {
            kind: WeightKind::Gamma,
            from,
            to,
            weight,
        });
        beta.chain(gamma).collect()
    }
}

fn lookup(map: &BTreeMap<(ViewId, ViewId), f64>, from: ViewId, to: ViewId) -> Result<f64> {
    map.get(&(from, to)).copied().ok_or_else(|| Error::MissingWeight {
        from: from.to_string(),
        to: to.to_string(),
    })
}

/// Closed-form weights from the KKT conditions: each term's squared
/// magnitude over the sum of squares. All-zero rows get uniform weights.
pub fn kkt_weights(terms: &[f64]) -> Vec<f64> {
    if terms.is_empty() {
        return Vec::new();
    }
    // Scale by the largest magnitude first so squaring cannot overflow.
    let peak = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
    if peak == 0.0 || !peak.is_finite() {
        return vec![1.0 / terms.len() as f64; terms.len()];
    }
    let squares: Vec<f64> = terms.iter().map(|t| (t / peak).powi(2)).collect();
    let total: f64 = squares.iter().sum();
    squares.iter().map(|s| s / total).collect()
}

/// β for every same-modality pair, from the current factors.
pub fn optimize_beta(tree: &ModalityTree) -> Result<BTreeMap<(ViewId, ViewId), f64>> {
    let mut beta = BTreeMap::new();
    for id in tree.view_ids() {
        let terms = multiview_terms(tree, id, tree)?;
        let values: Vec<f64> = terms.iter().map(|&(_, c)| c).collect();
        for ((other, _), w) in terms.into_iter().zip(kkt_weights(&values)) {
            beta.insert((id, other), w);
        }
    }
    Ok(beta)
}

/// γ for every cross-modality pair, from the current factors.
pub fn optimize_gamma(tree: &ModalityTree) -> Result<BTreeMap<(ViewId, ViewId), f64>> {
    let mut gamma = BTreeMap::new();
    for id in tree.view_ids() {
        let terms = multimodal_terms(tree, id, tree)?;
        let values: Vec<f64> = terms.iter().map(|&(_, o)| o).collect();
        for ((other, _), w) in terms.into_iter().zip(kkt_weights(&values)) {
            gamma.insert((id, other), w);
        }
    }
    Ok(gamma)
}

pub fn optimize_weights(tree: &ModalityTree) -> Result<CollaborationWeights> {
    Ok(CollaborationWeights {
        beta: optimize_beta(tree)?,
        gamma: optimize_gamma(tree)?,
    })
}
