//! Multi-view and multi-modal collaboration between per-view NMF models.

mod engine;
mod terms;
mod tree;
mod update;
mod weights;

pub use engine::{
    collaborate, collaborate_rounds, local_phase, run_algorithm, view_seed, AlgorithmOutput,
    CollaborationMode, CollaborationOptions, ComponentTrace, ExperimentTrace, RoundRecord,
};
pub use terms::{
    distance_matrix, multimodal_term, multimodal_terms, multiview_term, multiview_terms,
    snapshot_objective, total_objective, view_objective, view_objective_against, Partitions,
};
pub use tree::{
    Modality, ModalityData, ModalityTree, MultiModalData, Snapshot, View, ViewData, ViewId,
};
pub use update::{collaborative_step, gradient_split_f, gradient_split_g};
pub use weights::{
    kkt_weights, optimize_beta, optimize_gamma, optimize_weights, CollaborationWeights,
    WeightEntry, WeightKind,
};
