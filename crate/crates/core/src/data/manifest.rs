//! TOML experiment manifests.
//!
//! ```toml
//! name = "demo"
//! k = 3
//! labels_path = "labels.txt"
//!
//! [solver]
//! max_iter = 500
//! rel_tol = 1e-6
//! eps = 1e-12
//! seed = 7
//! restarts = 1
//!
//! [collaboration]
//! enabled = true
//! refresh_weights = false
//!
//! [[modalities]]
//! name = "image"
//!
//! [[modalities.views]]
//! name = "texture"
//! matrix_path = "texture.csv"
//! preprocess = { kind = "pca", target_dim = 8 }
//! noise = { stddev = 1.0 }
//! ```
//!
//! Relative paths resolve against the manifest's directory. Unknown keys
//! are rejected.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::collab::{view_seed, ModalityData, MultiModalData, ViewData};
use crate::error::{Error, Result};
use crate::matrix::DEFAULT_EPS;
use crate::nmf::NmfConfig;

use super::io::{load_labels, load_matrix, read_matrix};
use super::noise::add_gaussian_noise;
use super::pca::pca_nonneg;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Preprocess {
    #[default]
    None,
    Pca { target_dim: usize },
}

impl Preprocess {
    pub fn is_none(&self) -> bool {
        *self == Preprocess::None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    pub stddev: f64,
    /// Defaults to a value derived from the experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ViewEntry {
    pub name: String,
    pub matrix_path: PathBuf,
    #[serde(default, skip_serializing_if = "Preprocess::is_none")]
    pub preprocess: Preprocess,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    /// Fixes this view's solver seed instead of deriving it from the
    /// experiment seed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModalityEntry {
    pub name: String,
    pub views: Vec<ViewEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
}

fn default_max_iter() -> usize {
    500
}
fn default_rel_tol() -> f64 {
    1e-6
}
fn default_eps() -> f64 {
    DEFAULT_EPS
}
fn default_restarts() -> usize {
    1
}

impl Default for SolverSection {
    fn default() -> Self {
        Self {
            max_iter: default_max_iter(),
            rel_tol: default_rel_tol(),
            eps: default_eps(),
            seed: 0,
            restarts: default_restarts(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollaborationSection {
    #[serde(default = "default_true")]
    pub enabled: bool,
    #[serde(default)]
    pub refresh_weights: bool,
}

fn default_true() -> bool {
    true
}

impl Default for CollaborationSection {
    fn default() -> Self {
        Self {
            enabled: true,
            refresh_weights: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentManifest {
    pub name: String,
    pub k: usize,
    pub modalities: Vec<ModalityEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels_path: Option<PathBuf>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub collaboration: CollaborationSection,
}

impl ExperimentManifest {
    pub fn from_toml(text: &str, origin: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_col(text, s.start))
                .unwrap_or((1, 1));
            Error::Parse {
                path: origin.to_path_buf(),
                line,
                column,
                message: e.message().to_string(),
            }
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("manifest is always representable as TOML")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn nmf_config(&self, seed_override: Option<u64>) -> NmfConfig {
        NmfConfig {
            k: self.k,
            max_iter: self.solver.max_iter,
            rel_tol: self.solver.rel_tol,
            eps: self.solver.eps,
            seed: seed_override.unwrap_or(self.solver.seed),
            restarts: self.solver.restarts,
        }
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

const NOISE_SALT: u64 = 0x4E4F_4953_4500_0001;

/// A manifest with every view loaded, preprocessed and validated.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedExperiment {
    pub manifest: ExperimentManifest,
    pub config: NmfConfig,
    pub data: MultiModalData,
    pub labels: Option<Vec<usize>>,
}

impl LoadedExperiment {
    /// Loads and validates everything the solver needs. `seed_override`
    /// replaces the manifest's solver seed.
    pub fn load(manifest_path: impl AsRef<Path>, seed_override: Option<u64>) -> Result<Self> {
        let manifest_path = manifest_path.as_ref();
        let manifest = ExperimentManifest::load(manifest_path)?;
        let base = manifest_path.parent().unwrap_or(Path::new("."));
        Self::from_manifest(manifest, base, seed_override)
    }

    pub fn from_manifest(manifest: ExperimentManifest, base: &Path, seed_override: Option<u64>) -> Result<Self> {
        let config = manifest.nmf_config(seed_override);
        config.validate()?;
        if manifest.modalities.is_empty() {
            return Err(Error::Validation("manifest lists no modalities".into()));
        }
        let resolve = |p: &Path| if p.is_absolute() { p.to_path_buf() } else { base.join(p) };

        let mut index = 0;
        let mut modalities = Vec::new();
        for m in &manifest.modalities {
            if m.views.is_empty() {
                return Err(Error::Validation(format!("modality '{}' has no views", m.name)));
            }
            let mut views = Vec::new();
            for v in &m.views {
                let path = resolve(&v.matrix_path);
                let mut x = match v.preprocess {
                    Preprocess::None => load_matrix(&path)?,
                    Preprocess::Pca { target_dim } => {
                        if target_dim < manifest.k {
                            return Err(Error::Validation(format!(
                                "view '{}/{}': PCA target_dim {target_dim} is below k = {}",
                                m.name, v.name, manifest.k
                            )));
                        }
                        pca_nonneg(&read_matrix(&path)?, target_dim)?
                    }
                };
                if let Some(noise) = v.noise {
                    let seed = noise.seed.unwrap_or_else(|| view_seed(config.seed ^ NOISE_SALT, index));
                    x = add_gaussian_noise(&x, noise.stddev, seed)?;
                }
                config.validate_for(&x).map_err(|e| {
                    Error::Validation(format!("view '{}/{}': {e}", m.name, v.name))
                })?;
                let mut view = ViewData::new(v.name.clone(), x);
                if let Some(seed) = v.seed {
                    view = view.with_seed(seed);
                }
                views.push(view);
                index += 1;
            }
            modalities.push(ModalityData::new(m.name.clone(), views));
        }
        let data = MultiModalData::new(modalities)?;
        let labels = match &manifest.labels_path {
            Some(p) => {
                let labels = load_labels(resolve(p))?;
                if labels.len() != data.n_objects() {
                    return Err(Error::Validation(format!(
                        "labels file has {} entries, views have {} objects",
                        labels.len(),
                        data.n_objects()
                    )));
                }
                Some(labels)
            }
            None => None,
        };
        Ok(Self {
            manifest,
            config,
            data,
            labels,
        })
    }
}
