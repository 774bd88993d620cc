//! Slow reference solver for tiny instances: projected subgradient descent with
//! diminishing steps, used to cross-check the ADMM solvers.
//!
//! The iterate is parameterized as `(R_k, P_k)` with `S_k = R_k + P_k`, so the feasible
//! set `{R_k ⪰ floor·I, P_k ⪰ 0}` is a product of two sets with exact eigenvalue
//! projections. Steps are normalized subgradient steps of length `a_e / sqrt(t + 1)`;
//! the budget is spent in epochs of doubling length, each restarting from the best
//! feasible point found so far with `a_e` halved.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{eigh, SymMatrix};
use crate::sampling::ObservedCovariances;

use super::PenaltyWeights;

const MAX_DIM: usize = 5;
const MAX_LAYERS: usize = 3;

/// The convex problems the oracle can solve.
#[derive(Clone, Debug)]
pub enum OracleProblem {
    /// The joint latent-variable objective; `K = 1` with no pair weights is LVGL.
    JointHidden {
        covs: ObservedCovariances,
        weights: PenaltyWeights,
        penalize_diagonal: bool,
    },
    /// The group graphical lasso objective (`P ≡ 0`); `K = 1`, `lambda2 = 0` is GL.
    Ggl {
        covs: ObservedCovariances,
        lambda1: f64,
        lambda2: f64,
        penalize_diagonal: bool,
    },
}

impl OracleProblem {
    pub fn lvgl(cov: SymMatrix, rho: f64, beta: f64) -> Result<Self> {
        Ok(OracleProblem::JointHidden {
            covs: ObservedCovariances::from_matrices(vec![cov])?,
            weights: PenaltyWeights::tied(1, rho, beta, 0.0, 0.0)?,
            penalize_diagonal: false,
        })
    }

    fn covs(&self) -> &ObservedCovariances {
        match self {
            OracleProblem::JointHidden { covs, .. } | OracleProblem::Ggl { covs, .. } => covs,
        }
    }

    fn has_latent(&self) -> bool {
        matches!(self, OracleProblem::JointHidden { .. })
    }

    /// Objective at `(S, P)`; `+inf` if infeasible.
    pub fn objective(&self, s: &[SymMatrix], p: &[SymMatrix]) -> f64 {
        match self {
            OracleProblem::JointHidden {
                covs,
                weights,
                penalize_diagonal,
            } => super::joint_objective(s, p, covs, weights, *penalize_diagonal),
            OracleProblem::Ggl {
                covs,
                lambda1,
                lambda2,
                penalize_diagonal,
            } => super::ggl_objective(s, covs, *lambda1, *lambda2, *penalize_diagonal),
        }
    }
}

/// Starting point: `S = scale·I`, `P = 0.01·scale·I` (`P = 0` for problems without `P`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleStart {
    pub scale: f64,
}

impl Default for OracleStart {
    fn default() -> Self {
        OracleStart { scale: 1.0 }
    }
}

#[derive(Clone, Debug)]
pub struct OracleSolution {
    pub s: Vec<SymMatrix>,
    pub p: Vec<SymMatrix>,
    pub objective: f64,
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn sign_matrix(m: &DMatrix<f64>, include_diagonal: bool) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        if i == j && !include_diagonal {
            0.0
        } else {
            sign(m[(i, j)])
        }
    })
}

fn project_min_eig(m: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let e = eigh(&SymMatrix::new(m.clone()).expect("square")).expect("finite iterate");
    e.map_spectrum(|l| l.max(floor)).into_inner()
}

/// Minimizes `problem` by projected subgradient descent within `budget` steps.
pub fn reference_oracle(
    problem: &OracleProblem,
    budget: usize,
    start: OracleStart,
) -> Result<OracleSolution> {
    let covs = problem.covs();
    let k = covs.num_layers();
    let n = covs.dim();
    if n > MAX_DIM || k > MAX_LAYERS {
        return Err(Error::invalid(format!(
            "reference oracle is limited to dim <= {MAX_DIM} and K <= {MAX_LAYERS} (got dim {n}, K {k})"
        )));
    }
    if budget == 0 || !(start.scale > 0.0) {
        return Err(Error::invalid("budget and start scale must be positive"));
    }
    if let OracleProblem::JointHidden { weights, .. } = problem {
        if weights.num_layers() != k {
            return Err(Error::invalid("weights and covariances disagree on K"));
        }
    }
    let latent = problem.has_latent();
    let floor = 1e-8;
    let eye = DMatrix::<f64>::identity(n, n);
    let p0 = if latent { 0.01 * start.scale } else { 0.0 };
    let mut r: Vec<DMatrix<f64>> = vec![&eye * (start.scale - p0); k];
    let mut p: Vec<DMatrix<f64>> = vec![&eye * p0; k];

    let eval = |r: &[DMatrix<f64>], p: &[DMatrix<f64>]| -> f64 {
        let s: Vec<SymMatrix> = r
            .iter()
            .zip(p)
            .map(|(r, p)| SymMatrix::new(r + p).expect("square"))
            .collect();
        let pp: Vec<SymMatrix> = p
            .iter()
            .map(|p| SymMatrix::new(p.clone()).expect("square"))
            .collect();
        problem.objective(&s, &pp)
    };

    let mut best_val = eval(&r, &p);
    let mut best = (r.clone(), p.clone());
    let mut step0 = 0.5 * start.scale.max(1.0);
    let mut used = 0usize;
    let mut epoch_len = (budget / 64).max(1000).min(budget);

    while used < budget {
        let len = epoch_len.min(budget - used);
        r = best.0.clone();
        p = best.1.clone();
        for t in 0..len {
            let (gr, gp) = subgradient(problem, &r, &p);
            let gnorm = gr
                .iter()
                .chain(gp.iter())
                .map(|g| g.norm_squared())
                .sum::<f64>()
                .sqrt();
            if gnorm == 0.0 {
                break;
            }
            let alpha = step0 / ((t + 1) as f64).sqrt() / gnorm;
            for l in 0..k {
                r[l] = project_min_eig(&(&r[l] - &gr[l] * alpha), floor);
                if latent {
                    p[l] = project_min_eig(&(&p[l] - &gp[l] * alpha), 0.0);
                }
            }
            let val = eval(&r, &p);
            if val < best_val {
                best_val = val;
                best = (r.clone(), p.clone());
            }
        }
        used += len;
        epoch_len *= 2;
        step0 *= 0.5;
    }

    let s = best
        .0
        .iter()
        .zip(&best.1)
        .map(|(r, p)| SymMatrix::new(r + p).expect("square"))
        .collect();
    let p = best
        .1
        .into_iter()
        .map(|p| SymMatrix::new(p).expect("square"))
        .collect();
    Ok(OracleSolution {
        s,
        p,
        objective: best_val,
    })
}

/// Subgradients of the objective with respect to `R` and `P`.
fn subgradient(
    problem: &OracleProblem,
    r: &[DMatrix<f64>],
    p: &[DMatrix<f64>],
) -> (Vec<DMatrix<f64>>, Vec<DMatrix<f64>>) {
    let k = r.len();
    let n = r[0].nrows();
    let s: Vec<DMatrix<f64>> = r.iter().zip(p).map(|(r, p)| r + p).collect();
    let covs = problem.covs().covs();
    let mut gs = vec![DMatrix::<f64>::zeros(n, n); k];
    let mut gp = vec![DMatrix::<f64>::zeros(n, n); k];
    match problem {
        OracleProblem::JointHidden {
            weights,
            penalize_diagonal,
            ..
        } => {
            for l in 0..k {
                gs[l] += sign_matrix(&s[l], *penalize_diagonal) * weights.rho[l];
                gp[l] += DMatrix::<f64>::identity(n, n) * weights.beta[l];
            }
            for (a, b, w) in weights.rho_pair.iter() {
                if w > 0.0 {
                    let g = sign_matrix(&(&s[a] - &s[b]), *penalize_diagonal) * w;
                    gs[a] += &g;
                    gs[b] -= &g;
                }
            }
            for (a, b, w) in weights.beta_pair.iter() {
                if w > 0.0 {
                    let g = sign_matrix(&(&p[a] - &p[b]), true) * w;
                    gp[a] += &g;
                    gp[b] -= &g;
                }
            }
        }
        OracleProblem::Ggl {
            lambda1,
            lambda2,
            penalize_diagonal,
            ..
        } => {
            for l in 0..k {
                gs[l] += sign_matrix(&s[l], *penalize_diagonal) * *lambda1;
            }
            if *lambda2 > 0.0 {
                for i in 0..n {
                    for j in 0..n {
                        if i == j {
                            continue;
                        }
                        let norm = s.iter().map(|m| m[(i, j)].powi(2)).sum::<f64>().sqrt();
                        if norm > 0.0 {
                            for l in 0..k {
                                gs[l][(i, j)] += lambda2 * s[l][(i, j)] / norm;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut gr = Vec::with_capacity(k);
    for l in 0..k {
        let inv = r[l]
            .clone()
            .cholesky()
            .map(|c| c.inverse())
            .unwrap_or_else(|| DMatrix::zeros(n, n));
        let smooth = covs[l].as_matrix() - inv;
        gr.push(&smooth + &gs[l]);
        // d/dP of the likelihood through S = R + P is zero: it depends on R only.
        gp[l] += &gs[l];
    }
    (gr, gp)
}
