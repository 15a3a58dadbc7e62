//! Seeded synthetic multi-modal clustering data.
//!
//! Every view sees the same objects with the same class labels. Each view
//! draws its own K centers; an object's features are gamma-distributed
//! around its class center, so data stay non-negative at any dispersion.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::collab::{view_seed, ModalityData, MultiModalData, ViewData};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::noise::add_gaussian_noise;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViewSpec {
    pub name: String,
    pub dim: usize,
    /// Standard deviation of each feature around its center value.
    pub dispersion: f64,
    /// Extra Gaussian noise added after generation.
    pub noise: Option<f64>,
}

impl ViewSpec {
    pub fn new(name: impl Into<String>, dim: usize, dispersion: f64) -> Self {
        Self {
            name: name.into(),
            dim,
            dispersion,
            noise: None,
        }
    }

    pub fn with_noise(mut self, stddev: f64) -> Self {
        self.noise = Some(stddev);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModalitySpec {
    pub name: String,
    pub views: Vec<ViewSpec>,
}

impl ModalitySpec {
    pub fn new(name: impl Into<String>, views: Vec<ViewSpec>) -> Self {
        Self {
            name: name.into(),
            views,
        }
    }
}

/// Center coordinates are drawn uniformly from this range.
pub const CENTER_RANGE: (f64, f64) = (0.05, 1.0);

const NOISE_SALT: u64 = 0x6E6F_6973_6500_0000;

fn validate(n_objects: usize, k: usize, modalities: &[ModalitySpec]) -> Result<()> {
    if k == 0 {
        return Err(Error::Config("cluster count must be positive".into()));
    }
    if n_objects < 2 * k {
        return Err(Error::Config(format!(
            "need at least {} objects for {k} clusters, got {n_objects}",
            2 * k
        )));
    }
    if modalities.is_empty() || modalities.iter().any(|m| m.views.is_empty()) {
        return Err(Error::Config("every modality needs at least one view".into()));
    }
    for v in modalities.iter().flat_map(|m| &m.views) {
        if v.dim == 0 {
            return Err(Error::Config(format!("view '{}' has zero dimension", v.name)));
        }
        if !(v.dispersion >= 0.0 && v.dispersion.is_finite()) {
            return Err(Error::Config(format!("view '{}' has invalid dispersion", v.name)));
        }
        if v.noise.is_some_and(|s| !(s >= 0.0 && s.is_finite())) {
            return Err(Error::Config(format!("view '{}' has invalid noise", v.name)));
        }
    }
    Ok(())
}

/// Balanced labels `i mod k`, shuffled.
pub fn balanced_labels(n_objects: usize, k: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut labels: Vec<usize> = (0..n_objects).map(|i| i % k).collect();
    labels.shuffle(rng);
    labels
}

/// K×dim matrix of class centers for one view (one center per row).
pub fn view_centers(dim: usize, k: usize, rng: &mut impl Rng) -> Matrix {
    let (lo, hi) = CENTER_RANGE;
    Matrix::from_fn(k, dim, |_, _| rng.random_range(lo..hi))
}

fn sample_around(center: f64, dispersion: f64, rng: &mut impl Rng) -> f64 {
    if dispersion == 0.0 {
        return center;
    }
    // Gamma with mean `center` and standard deviation `dispersion`.
    let shape = (center / dispersion).powi(2);
    let scale = dispersion * dispersion / center;
    Gamma::new(shape, scale).map(|g| g.sample(rng)).unwrap_or(center)
}

/// Generated views plus the centers each view was drawn around.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthDataset {
    pub data: MultiModalData,
    pub labels: Vec<usize>,
    /// Per view, in `view_ids` order: K×dim centers.
    pub centers: Vec<Matrix>,
}

pub fn synth_multimodal(
    n_objects: usize,
    k: usize,
    modalities: &[ModalitySpec],
    seed: u64,
) -> Result<SynthDataset> {
    validate(n_objects, k, modalities)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let labels = balanced_labels(n_objects, k, &mut rng);
    let mut centers_out = Vec::new();
    let mut index = 0;
    let mut out = Vec::with_capacity(modalities.len());
    for m in modalities {
        let mut views = Vec::with_capacity(m.views.len());
        for v in &m.views {
            let mut rng = ChaCha8Rng::seed_from_u64(view_seed(seed, index));
            let centers = view_centers(v.dim, k, &mut rng);
            let mut x = Matrix::zeros(v.dim, n_objects);
            for (j, &label) in labels.iter().enumerate() {
                for i in 0..v.dim {
                    x.set(i, j, sample_around(centers.get(label, i), v.dispersion, &mut rng));
                }
            }
            if let Some(stddev) = v.noise {
                x = add_gaussian_noise(&x, stddev, view_seed(seed ^ NOISE_SALT, index))?;
            }
            views.push(ViewData::new(v.name.clone(), x));
            centers_out.push(centers);
            index += 1;
        }
        out.push(ModalityData::new(m.name.clone(), views));
    }
    Ok(SynthDataset {
        data: MultiModalData::new(out)?,
        labels,
        centers: centers_out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{purity, LabeledAssignment};

    fn specs(dispersion: f64) -> Vec<ModalitySpec> {
        vec![
            ModalitySpec::new("a", vec![ViewSpec::new("a1", 6, dispersion), ViewSpec::new("a2", 4, dispersion)]),
            ModalitySpec::new("b", vec![ViewSpec::new("b1", 5, dispersion)]),
        ]
    }

    fn nearest_center(x: &Matrix, centers: &Matrix) -> Vec<usize> {
        (0..x.cols())
            .map(|j| {
                let dist = |c: usize| -> f64 {
                    (0..x.rows()).map(|i| (x.get(i, j) - centers.get(c, i)).powi(2)).sum()
                };
                (0..centers.rows())
                    .min_by(|&a, &b| dist(a).total_cmp(&dist(b)))
                    .unwrap()
            })
            .collect()
    }

    #[test]
    fn zero_dispersion_is_separable() {
        let ds = synth_multimodal(30, 3, &specs(0.0), 4).unwrap();
        for (id, centers) in ds.data.view_ids().into_iter().zip(&ds.centers) {
            let assigned = nearest_center(&ds.data.view(id).x, centers);
            let a = LabeledAssignment::new(ds.labels.clone(), assigned).unwrap();
            assert_eq!(purity(&a).unwrap(), 1.0);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let a = synth_multimodal(40, 4, &specs(0.2), 11).unwrap();
        let b = synth_multimodal(40, 4, &specs(0.2), 11).unwrap();
        assert_eq!(a, b);
        let c = synth_multimodal(40, 4, &specs(0.2), 12).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn labels_are_balanced() {
        for (n, k) in [(31, 3), (40, 4), (17, 5)] {
            let ds = synth_multimodal(n, k, &specs(0.1), 2).unwrap();
            let mut counts = vec![0usize; k];
            ds.labels.iter().for_each(|&l| counts[l] += 1);
            let (lo, hi) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
            assert!(hi - lo <= 1, "{counts:?}");
        }
    }

    #[test]
    fn output_is_nonnegative() {
        let mut s = specs(0.5);
        s[0].views[0].noise = Some(1.0);
        let ds = synth_multimodal(20, 2, &s, 1).unwrap();
        for id in ds.data.view_ids() {
            assert!(ds.data.view(id).x.min() >= 0.0);
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(synth_multimodal(3, 2, &specs(0.1), 0).is_err());
        assert!(synth_multimodal(10, 2, &[], 0).is_err());
        assert!(synth_multimodal(10, 2, &specs(-1.0), 0).is_err());
    }
}
