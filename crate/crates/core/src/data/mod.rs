//! Dataset loading, preprocessing and synthetic generation.

mod io;
mod manifest;
mod noise;
mod pca;
mod synth;

pub use io::{
    format_matrix, load_labels, load_matrix, parse_matrix, read_matrix, save_labels, save_matrix,
    write_atomic,
};
pub use manifest::{
    CollaborationSection, ExperimentManifest, LoadedExperiment, ModalityEntry, NoiseSpec,
    Preprocess, SolverSection, ViewEntry,
};
pub use noise::add_gaussian_noise;
pub use pca::{pca_nonneg, Pca};
pub use synth::{
    balanced_labels, synth_multimodal, view_centers, ModalitySpec, SynthDataset, ViewSpec,
    CENTER_RANGE,
};
