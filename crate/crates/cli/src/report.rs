//! Report documents written by `run` and `compare`, plus their flat CSV
//! renderings.

use mmvnmf::collab::{
    CollaborationMode, CollaborationWeights, ComponentTrace, ModalityTree, ViewId, WeightKind,
};
use mmvnmf::data::ExperimentManifest;
use mmvnmf::metrics::{purity, silhouette, LabeledAssignment};
use mmvnmf::nmf::local_objective;
use mmvnmf::{Error, NmfConfig, Result};
use serde::Serialize;

/// Clustering quality of one view at one stage.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewMetrics {
    pub purity: f64,
    /// `None` when the silhouette is undefined for the assignment (for
    /// example, a single occupied cluster); the reason is in
    /// `silhouette_error`.
    pub silhouette: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub silhouette_error: Option<String>,
    /// Reconstruction error ‖X − FG‖² of the view's factors.
    pub objective: f64,
}

impl ViewMetrics {
    pub fn of_view(tree: &ModalityTree, id: ViewId, labels: &[usize]) -> Result<Self> {
        let view = tree.view(id);
        let clusters = mmvnmf::nmf::hard_assign(&view.factors.g);
        let (silhouette, silhouette_error) = silhouette_or_reason(&view.x, &clusters)?;
        Ok(Self {
            purity: purity(&LabeledAssignment::new(labels.to_vec(), clusters)?)?,
            silhouette,
            silhouette_error,
            objective: local_objective(&view.x, &view.factors)?,
        })
    }
}

/// Silhouette, with the undefined case turned into a reported reason.
pub fn silhouette_or_reason(x: &mmvnmf::Matrix, clusters: &[usize]) -> Result<(Option<f64>, Option<String>)> {
    match silhouette(x, clusters) {
        Ok(s) => Ok((Some(s), None)),
        Err(e @ Error::UndefinedSilhouette(_)) => Ok((None, Some(e.to_string()))),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewReport {
    pub id: ViewId,
    pub modality: String,
    pub view: String,
    pub local: ViewMetrics,
    pub post: ViewMetrics,
    /// Objective per local-phase iteration, starting at initialization.
    pub local_trace: Vec<f64>,
    pub local_converged: bool,
    /// Restart that produced the kept local factorization.
    pub local_restart: usize,
    /// Reconstruction error per collaboration round, starting with the
    /// local-phase result. Empty when the view did not collaborate.
    pub collaboration_trace: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub modalities: Vec<String>,
    pub converged: bool,
    pub rounds: usize,
    /// Joint objective per round, starting with the local-phase result.
    pub total_objective: Vec<f64>,
}

impl ComponentReport {
    pub fn new(trace: &ComponentTrace, tree: &ModalityTree) -> Self {
        Self {
            modalities: trace
                .modalities
                .iter()
                .map(|&p| tree.modalities()[p].name.clone())
                .collect(),
            converged: trace.converged,
            rounds: trace.n_rounds(),
            total_objective: trace.total_objectives(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightRow {
    pub kind: WeightKind,
    pub from: String,
    pub to: String,
    pub weight: f64,
}

pub fn weight_rows(w: &CollaborationWeights, tree: &ModalityTree) -> Vec<WeightRow> {
    w.entries()
        .into_iter()
        .map(|e| WeightRow {
            kind: e.kind,
            from: qualified_name(tree, e.from),
            to: qualified_name(tree, e.to),
            weight: e.weight,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightReport {
    pub initial: Vec<WeightRow>,
    #[serde(rename = "final")]
    pub last: Vec<WeightRow>,
}

/// Everything needed to reproduce a report: the manifest as loaded and the
/// solver configuration actually used.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub manifest: ExperimentManifest,
    pub solver: NmfConfig,
    pub refresh_weights: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub seed: u64,
    pub mode: CollaborationMode,
    pub config: ConfigEcho,
    pub views: Vec<ViewReport>,
    pub components: Vec<ComponentReport>,
    pub weights: WeightReport,
    /// The only field that differs between identical runs.
    pub wall_clock_seconds: f64,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "modality,view,local_purity,local_silhouette,local_objective,post_purity,post_silhouette,post_objective\n",
        );
        for v in &self.views {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                csv_field(&v.modality),
                csv_field(&v.view),
                v.local.purity,
                opt(v.local.silhouette),
                v.local.objective,
                v.post.purity,
                opt(v.post.silhouette),
                v.post.objective,
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub id: ViewId,
    pub modality: String,
    pub view: String,
    pub local: ViewMetrics,
    pub multi_view: ViewMetrics,
    pub full: ViewMetrics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub name: String,
    pub seed: u64,
    pub config: ConfigEcho,
    pub views: Vec<ComparisonRow>,
    pub multi_view_components: Vec<ComponentReport>,
    pub full_components: Vec<ComponentReport>,
    pub wall_clock_seconds: f64,
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "modality,view,local_purity,multi_view_purity,full_purity,local_silhouette,multi_view_silhouette,full_silhouette\n",
        );
        for r in &self.views {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                csv_field(&r.modality),
                csv_field(&r.view),
                r.local.purity,
                r.multi_view.purity,
                r.full.purity,
                opt(r.local.silhouette),
                opt(r.multi_view.silhouette),
                opt(r.full.silhouette),
            ));
        }
        out
    }
}

pub fn qualified_name(tree: &ModalityTree, id: ViewId) -> String {
    format!("{}/{}", tree.modalities()[id.modality].name, tree.view(id).name)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
