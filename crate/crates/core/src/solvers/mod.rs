//! Penalized maximum-likelihood estimators of (joint, latent-variable) Gaussian
//! graphical models, all solved by ADMM over the [`crate::kernels`] prox operators,
//! plus a slow projected-subgradient reference solver for tiny instances.

mod ggl;
mod joint;
mod objective;
mod oracle;

pub use ggl::{solve_ggl, solve_gl};
pub use joint::{solve_joint_hidden, solve_lvgl};
pub use objective::{ggl_objective, joint_objective};
pub use oracle::{reference_oracle, OracleProblem, OracleSolution, OracleStart};

use crate::error::{Error, Result};
use crate::kernels::{PairWeights, SymMatrix};

/// Regularization weights of the joint latent-variable objective.
#[derive(Clone, Debug, PartialEq)]
pub struct PenaltyWeights {
    /// Sparsity weight on each `S_O^(k)`.
    pub rho: Vec<f64>,
    /// Trace (nuclear-norm) weight on each `P^(k)`.
    pub beta: Vec<f64>,
    /// Fusion weight on `S_O^(k) - S_O^(k')`.
    pub rho_pair: PairWeights,
    /// Fusion weight on `P^(k) - P^(k')`.
    pub beta_pair: PairWeights,
}

impl PenaltyWeights {
    pub fn new(
        rho: Vec<f64>,
        beta: Vec<f64>,
        rho_pair: PairWeights,
        beta_pair: PairWeights,
    ) -> Result<Self> {
        let k = rho.len();
        if k == 0 {
            return Err(Error::invalid("at least one layer is required"));
        }
        if beta.len() != k || rho_pair.num_layers() != k || beta_pair.num_layers() != k {
            return Err(Error::invalid(
                "penalty weights disagree on the number of layers",
            ));
        }
        if let Some(bad) = rho
            .iter()
            .chain(beta.iter())
            .find(|w| !(**w >= 0.0) || !w.is_finite())
        {
            return Err(Error::invalid(format!(
                "penalty weights must be nonnegative, got {bad}"
            )));
        }
        Ok(PenaltyWeights {
            rho,
            beta,
            rho_pair,
            beta_pair,
        })
    }

    /// Same weight for every layer and for every pair of layers.
    pub fn tied(k: usize, rho: f64, beta: f64, rho_pair: f64, beta_pair: f64) -> Result<Self> {
        Self::new(
            vec![rho; k],
            vec![beta; k],
            PairWeights::uniform(k, rho_pair)?,
            PairWeights::uniform(k, beta_pair)?,
        )
    }

    pub fn num_layers(&self) -> usize {
        self.rho.len()
    }
}

/// Constraint set for the estimated `S_O`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum AdmissibleSet {
    /// Any symmetric matrix.
    #[default]
    Symmetric,
    /// Symmetric with nonpositive off-diagonal entries (M-matrix style precision).
    NonpositiveOffdiag,
}

impl AdmissibleSet {
    pub(crate) fn offdiag_upper_bound(self) -> Option<f64> {
        match self {
            AdmissibleSet::Symmetric => None,
            AdmissibleSet::NonpositiveOffdiag => Some(0.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Initial ADMM penalty parameter.
    pub step: f64,
    pub max_iters: usize,
    /// Relative primal residual tolerance.
    pub tol_primal: f64,
    /// Relative dual residual tolerance.
    pub tol_dual: f64,
    /// Residual balancing of `step` (factor 2 whenever the residual ratio exceeds 10).
    pub adapt_step: bool,
    pub admissible_set: AdmissibleSet,
    /// Minimum eigenvalue required of the returned `S_O - P`.
    pub pd_floor: f64,
    /// Whether the l1 terms on `S` (sparsity and fusion) include the diagonal.
    pub penalize_diagonal: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            step: 1.0,
            max_iters: 2000,
            tol_primal: 1e-5,
            tol_dual: 1e-5,
            adapt_step: true,
            admissible_set: AdmissibleSet::Symmetric,
            pd_floor: 1e-8,
            penalize_diagonal: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::invalid("step must be positive"));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be at least 1"));
        }
        if !(self.tol_primal > 0.0) || !(self.tol_dual > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if !(self.pd_floor > 0.0) {
            return Err(Error::invalid("pd_floor must be positive"));
        }
        Ok(())
    }

    /// Same config with tighter tolerances and a larger iteration cap.
    pub fn tight(tol: f64, max_iters: usize) -> Self {
        SolverConfig {
            tol_primal: tol,
            tol_dual: tol,
            max_iters,
            ..Default::default()
        }
    }
}

/// Result of a joint latent-variable solve.
#[derive(Clone, Debug)]
pub struct JointEstimate {
    /// Estimated observed precision blocks `Ŝ_O^(k)`.
    pub s_hat: Vec<SymMatrix>,
    /// Estimated low-rank PSD corrections `P̂^(k)`.
    pub p_hat: Vec<SymMatrix>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Relative `(primal, dual)` residuals per iteration.
    pub residual_history: Vec<(f64, f64)>,
}

/// Result of a GL/GGL solve.
#[derive(Clone, Debug)]
pub struct GglEstimate {
    pub s_hat: Vec<SymMatrix>,
    pub objective: f64,
    pub iterations: usize,
    pub converged: bool,
    pub residual_history: Vec<(f64, f64)>,
}

pub(crate) fn check_pd_floor(s: &SymMatrix, p: Option<&SymMatrix>, floor: f64) -> Result<()> {
    let diff = match p {
        Some(p) => s - p,
        None => s.clone(),
    };
    let lam = diff.min_eigenvalue()?;
    if lam < 0.5 * floor {
        return Err(Error::numerical(format!(
            "estimate is not positive definite (min eigenvalue {lam:e})"
        )));
    }
    Ok(())
}
