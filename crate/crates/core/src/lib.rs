//! Multi-modal multi-view clustering with collaborative non-negative
//! matrix factorization.
//!
//! Each view of each modality is factorized locally as `X ≈ FG`; the views
//! then exchange partition information through a within-modality term
//! `‖(G − G') ∘ D‖²` and a cross-modality term `‖F(G − G')‖²`, weighted by
//! closed-form collaboration weights and minimized with multiplicative
//! updates.
//!
//! Enable the default `parallel` feature to run restarts, per-view updates
//! and silhouette scoring on rayon's thread pool.

pub mod collab;
pub mod data;
mod error;
pub mod matrix;
pub mod metrics;
pub mod nmf;
pub mod par;

pub use error::{Error, Result};
pub use matrix::{Matrix, DEFAULT_EPS};
pub use nmf::{FactorPair, NmfConfig, NmfFit};
