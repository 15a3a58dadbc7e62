//! Modalities, views and their factor pairs.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::nmf::{DataMatrix, FactorPair, PartitionMatrix};

/// Position of a view: modality index and view index within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ViewId {
    pub modality: usize,
    pub view: usize,
}

impl ViewId {
    pub const fn new(modality: usize, view: usize) -> Self {
        Self { modality, view }
    }
}

impl fmt::Display for ViewId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.modality, self.view)
    }
}

/// Raw data of one view before factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewData {
    pub name: String,
    pub x: DataMatrix,
    /// Overrides the seed derived from the experiment seed and the view's
    /// position.
    pub seed: Option<u64>,
}

impl ViewData {
    pub fn new(name: impl Into<String>, x: DataMatrix) -> Self {
        Self {
            name: name.into(),
            x,
            seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModalityData {
    pub name: String,
    pub views: Vec<ViewData>,
}

impl ModalityData {
    pub fn new(name: impl Into<String>, views: Vec<ViewData>) -> Self {
        Self {
            name: name.into(),
            views,
        }
    }
}

/// Every view of every modality, all describing the same N objects.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiModalData {
    pub modalities: Vec<ModalityData>,
}

impl MultiModalData {
    pub fn new(modalities: Vec<ModalityData>) -> Result<Self> {
        let data = Self { modalities };
        data.validate()?;
        Ok(data)
    }

    pub fn validate(&self) -> Result<()> {
        if self.modalities.is_empty() {
            return Err(Error::Validation("no modalities".into()));
        }
        let mut n = None;
        for m in &self.modalities {
            if m.views.is_empty() {
                return Err(Error::Validation(format!("modality '{}' has no views", m.name)));
            }
            for v in &m.views {
                if !v.x.is_nonnegative() || !v.x.is_finite() {
                    return Err(Error::Validation(format!(
                        "view '{}/{}' has negative or non-finite entries",
                        m.name, v.name
                    )));
                }
                match n {
                    None => n = Some(v.x.cols()),
                    Some(n) if n != v.x.cols() => {
                        return Err(Error::Validation(format!(
                            "view '{}/{}' has {} objects, expected {n}",
                            m.name,
                            v.name,
                            v.x.cols()
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    pub fn n_objects(&self) -> usize {
        self.modalities[0].views[0].x.cols()
    }

    pub fn view_ids(&self) -> Vec<ViewId> {
        self.modalities
            .iter()
            .enumerate()
            .flat_map(|(p, m)| (0..m.views.len()).map(move |v| ViewId::new(p, v)))
            .collect()
    }

    pub fn view(&self, id: ViewId) -> &ViewData {
        &self.modalities[id.modality].views[id.view]
    }

    /// Keeps only the listed modalities, in the given order.
    pub fn select_modalities(&self, keep: &[usize]) -> Result<Self> {
        let modalities = keep
            .iter()
            .map(|&p| {
                self.modalities
                    .get(p)
                    .cloned()
                    .ok_or_else(|| Error::Config(format!("no modality {p}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(modalities)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct View {
    pub name: String,
    pub x: DataMatrix,
    pub factors: FactorPair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Modality {
    pub name: String,
    pub views: Vec<View>,
}

/// Views with their current factorizations. All views share the object
/// count N and the cluster count K.
#[derive(Debug, Clone, PartialEq)]
pub struct ModalityTree {
    modalities: Vec<Modality>,
    n: usize,
    k: usize,
}

impl ModalityTree {
    pub fn new(modalities: Vec<Modality>) -> Result<Self> {
        let first = modalities
            .first()
            .and_then(|m| m.views.first())
            .ok_or_else(|| Error::Validation("tree needs at least one view".into()))?;
        let n = first.x.cols();
        let k = first.factors.k();
        for m in &modalities {
            if m.views.is_empty() {
                return Err(Error::Validation(format!("modality '{}' has no views", m.name)));
            }
            for v in &m.views {
                if v.x.cols() != n {
                    return Err(Error::Validation(format!(
                        "view '{}/{}' has {} objects, expected {n}",
                        m.name,
                        v.name,
                        v.x.cols()
                    )));
                }
                v.factors.check_against(&v.x)?;
                if v.factors.k() != k {
                    return Err(Error::Validation(format!(
                        "view '{}/{}' uses K = {}, expected {k}",
                        m.name,
                        v.name,
                        v.factors.k()
                    )));
                }
            }
        }
        Ok(Self { modalities, n, k })
    }

    pub fn n_objects(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn modalities(&self) -> &[Modality] {
        &self.modalities
    }

    pub fn n_views(&self) -> usize {
        self.modalities.iter().map(|m| m.views.len()).sum()
    }

    pub fn view_ids(&self) -> Vec<ViewId> {
        self.modalities
            .iter()
            .enumerate()
            .flat_map(|(p, m)| (0..m.views.len()).map(move |v| ViewId::new(p, v)))
            .collect()
    }

    pub fn contains(&self, id: ViewId) -> bool {
        self.modalities
            .get(id.modality)
            .is_some_and(|m| id.view < m.views.len())
    }

    pub fn view(&self, id: ViewId) -> &View {
        &self.modalities[id.modality].views[id.view]
    }

    pub fn view_mut(&mut self, id: ViewId) -> &mut View {
        &mut self.modalities[id.modality].views[id.view]
    }

    /// Other views of the same modality.
    pub fn same_modality_partners(&self, id: ViewId) -> Vec<ViewId> {
        (0..self.modalities[id.modality].views.len())
            .filter(|&v| v != id.view)
            .map(|v| ViewId::new(id.modality, v))
            .collect()
    }

    /// Every view of every other modality.
    pub fn distant_partners(&self, id: ViewId) -> Vec<ViewId> {
        self.view_ids()
            .into_iter()
            .filter(|other| other.modality != id.modality)
            .collect()
    }

    pub fn has_partners(&self) -> bool {
        self.n_views() > 1
    }

    pub fn partition(&self, id: ViewId) -> &PartitionMatrix {
        &self.view(id).factors.g
    }

    /// Replaces the factors of every view, in `view_ids` order.
    pub fn set_factors(&mut self, factors: Vec<FactorPair>) -> Result<()> {
        let ids = self.view_ids();
        if ids.len() != factors.len() {
            return Err(Error::Validation(format!(
                "{} factor pairs for {} views",
                factors.len(),
                ids.len()
            )));
        }
        for (id, fp) in ids.into_iter().zip(factors) {
            let view = self.view_mut(id);
            fp.check_against(&view.x)?;
            view.factors = fp;
        }
        Ok(())
    }

    /// Sub-tree over the listed modalities, in order.
    pub fn select_modalities(&self, keep: &[usize]) -> Result<Self> {
        Self::new(keep.iter().map(|&p| self.modalities[p].clone()).collect())
    }

    /// Hard cluster assignment of each view, in `view_ids` order.
    pub fn assignments(&self) -> Vec<Vec<usize>> {
        self.view_ids()
            .into_iter()
            .map(|id| crate::nmf::hard_assign(self.partition(id)))
            .collect()
    }
}

/// Frozen partition matrices of every view at the start of a round.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    partitions: Vec<Vec<Matrix>>,
}

impl Snapshot {
    pub fn of(tree: &ModalityTree) -> Self {
        Self {
            partitions: tree
                .modalities()
                .iter()
                .map(|m| m.views.iter().map(|v| v.factors.g.clone()).collect())
                .collect(),
        }
    }

    pub fn partition(&self, id: ViewId) -> &PartitionMatrix {
        &self.partitions[id.modality][id.view]
    }
}
