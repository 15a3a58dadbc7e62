//! Single-view NMF: seeded initialization, Lee–Seung multiplicative
//! updates, objective evaluation and hard cluster assignment.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Matrix, DEFAULT_EPS};

/// Non-negative feature matrix, features in rows and objects in columns.
pub type DataMatrix = Matrix;

/// K×N soft membership matrix.
pub type PartitionMatrix = Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmfConfig {
    pub k: usize,
    pub max_iter: usize,
    pub rel_tol: f64,
    pub eps: f64,
    pub seed: u64,
    pub restarts: usize,
}

impl NmfConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iter: 500,
            rel_tol: 1e-6,
            eps: DEFAULT_EPS,
            seed: 0,
            restarts: 1,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_max_iter(mut self, max_iter: usize) -> Self {
        self.max_iter = max_iter;
        self
    }

    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    /// Checks the configuration on its own, independent of any data.
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Config("k must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::Config("max_iter must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be positive".into()));
        }
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(Error::Config(format!("rel_tol {} not in (0, 1)", self.rel_tol)));
        }
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::Config(format!("eps {} must be positive", self.eps)));
        }
        Ok(())
    }

    /// Checks the configuration against a data matrix.
    pub fn validate_for(&self, x: &DataMatrix) -> Result<()> {
        self.validate()?;
        let limit = x.rows().min(x.cols());
        if self.k > limit {
            return Err(Error::Config(format!(
                "k = {} exceeds min(M, N) = {limit} for a {}x{} matrix",
                self.k,
                x.rows(),
                x.cols()
            )));
        }
        if !x.is_nonnegative() {
            return Err(Error::Validation("data matrix has negative entries".into()));
        }
        Ok(())
    }
}

/// Prototype matrix `f` (M×K) and partition matrix `g` (K×N).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorPair {
    pub f: Matrix,
    pub g: PartitionMatrix,
}

impl FactorPair {
    pub fn new(f: Matrix, g: PartitionMatrix) -> Result<Self> {
        if f.cols() != g.rows() {
            return Err(Error::ShapeMismatch {
                op: "factor pair",
                left: f.shape(),
                right: g.shape(),
            });
        }
        Ok(Self { f, g })
    }

    pub fn k(&self) -> usize {
        self.g.rows()
    }

    pub fn reconstruct(&self) -> Result<Matrix> {
        self.f.matmul(&self.g)
    }

    pub fn is_nonnegative(&self) -> bool {
        self.f.is_nonnegative() && self.g.is_nonnegative()
    }

    pub(crate) fn check_against(&self, x: &DataMatrix) -> Result<()> {
        if self.f.rows() != x.rows() || self.g.cols() != x.cols() || self.f.cols() != self.g.rows() {
            return Err(Error::ShapeMismatch {
                op: "factors vs data",
                left: (self.f.rows(), self.g.cols()),
                right: x.shape(),
            });
        }
        Ok(())
    }
}

/// Draws strictly positive factors, uniform on (0, 1] scaled by
/// `sqrt(mean(x) / k)` so that `FG` starts at the data's magnitude.
pub fn init_factors(x: &DataMatrix, cfg: &NmfConfig) -> Result<FactorPair> {
    cfg.validate_for(x)?;
    let k = cfg.k;
    let scale = (x.mean().max(cfg.eps) / k as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    // random() is on [0, 1); flip it onto (0, 1] so no entry starts at zero.
    let mut draw = || (1.0 - rng.random::<f64>()) * scale;
    let f = Matrix::from_fn(x.rows(), k, |_, _| draw());
    let g = Matrix::from_fn(k, x.cols(), |_, _| draw());
    Ok(FactorPair { f, g })
}

/// `‖X − FG‖²_F`.
pub fn local_objective(x: &DataMatrix, fp: &FactorPair) -> Result<f64> {
    fp.check_against(x)?;
    Ok(x.sub(&fp.reconstruct()?)?.frobenius_sq())
}

/// Positive and negative parts of ½∇_G‖X − FG‖²: `(FᵀF·G, FᵀX)`.
pub(crate) fn reconstruction_split_g(x: &DataMatrix, f: &Matrix, g: &Matrix) -> Result<(Matrix, Matrix)> {
    let ftf = f.tr_matmul(f)?;
    Ok((ftf.matmul(g)?, f.tr_matmul(x)?))
}

/// Positive and negative parts of ½∇_F‖X − FG‖²: `(F·GGᵀ, XGᵀ)`.
pub(crate) fn reconstruction_split_f(x: &DataMatrix, f: &Matrix, g: &Matrix) -> Result<(Matrix, Matrix)> {
    let ggt = g.matmul_tr(g)?;
    Ok((f.matmul(&ggt)?, x.matmul_tr(g)?))
}

/// One multiplicative update: G first, then F against the new G.
pub fn lee_seung_step(x: &DataMatrix, fp: &FactorPair, eps: f64) -> Result<FactorPair> {
    fp.check_against(x)?;
    let (pos, neg) = reconstruction_split_g(x, &fp.f, &fp.g)?;
    let g = fp.g.hadamard(&neg.safe_divide(&pos, eps)?)?;
    let (pos, neg) = reconstruction_split_f(x, &fp.f, &g)?;
    let f = fp.f.hadamard(&neg.safe_divide(&pos, eps)?)?;
    Ok(FactorPair { f, g })
}

/// Outcome of a (possibly restarted) local factorization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NmfFit {
    pub factors: FactorPair,
    /// Objective at initialization followed by one value per update.
    pub trace: Vec<f64>,
    pub converged: bool,
    /// Index of the restart that produced `factors`.
    pub restart: usize,
}

impl NmfFit {
    pub fn objective(&self) -> f64 {
        *self.trace.last().expect("trace is never empty")
    }
}

/// Relative change test shared by every iterative loop in the crate.
pub(crate) fn has_converged(prev: f64, current: f64, rel_tol: f64, eps: f64) -> bool {
    (current - prev).abs() / prev.max(eps) < rel_tol
}

/// Seed of restart `index` for base seed `seed`.
pub fn restart_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

fn run_single(x: &DataMatrix, cfg: &NmfConfig, restart: usize) -> Result<NmfFit> {
    let run_cfg = NmfConfig {
        seed: restart_seed(cfg.seed, restart),
        ..cfg.clone()
    };
    let mut factors = init_factors(x, &run_cfg)?;
    let mut trace = vec![local_objective(x, &factors)?];
    let mut converged = false;
    for _ in 0..cfg.max_iter {
        factors = lee_seung_step(x, &factors, cfg.eps)?;
        let prev = *trace.last().unwrap();
        let current = local_objective(x, &factors)?;
        trace.push(current);
        if has_converged(prev, current, cfg.rel_tol, cfg.eps) {
            converged = true;
            break;
        }
    }
    Ok(NmfFit {
        factors,
        trace,
        converged,
        restart,
    })
}

/// Runs `cfg.restarts` seeded factorizations and keeps the one with the
/// lowest final objective (earliest restart on ties).
pub fn run_local_nmf(x: &DataMatrix, cfg: &NmfConfig) -> Result<NmfFit> {
    cfg.validate_for(x)?;
    let fits = crate::par::map_range(cfg.restarts, |r| run_single(x, cfg, r));
    let mut best: Option<NmfFit> = None;
    for fit in fits {
        let fit = fit?;
        if best.as_ref().is_none_or(|b| fit.objective() < b.objective()) {
            best = Some(fit);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Hard cluster index per object: argmax of each column of `g`.
pub fn hard_assign(g: &PartitionMatrix) -> Vec<usize> {
    g.column_argmax()
}
