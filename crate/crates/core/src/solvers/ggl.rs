//! ADMM for the (group) graphical lasso: `R_k` through the log-det prox, a copy `Z_k`
//! through the per-entry group soft threshold across layers.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{group_prox_in_place, prox_logdet, soft, SymMatrix};
use crate::sampling::ObservedCovariances;

use super::joint::{check_covariances, initial_precision};
use super::objective::ggl_objective;
use super::{check_pd_floor, GglEstimate, SolverConfig};

/// Joint graphical lasso with the group penalty: element-wise l1 weight `lambda1` and a
/// group-l2 weight `lambda2` on each off-diagonal entry across layers.
pub fn solve_ggl(
    covs: &ObservedCovariances,
    lambda1: f64,
    lambda2: f64,
    cfg: &SolverConfig,
) -> Result<GglEstimate> {
    cfg.validate()?;
    if !(lambda1 >= 0.0) || !(lambda2 >= 0.0) {
        return Err(Error::invalid("penalty weights must be nonnegative"));
    }
    check_covariances(covs)?;
    let k = covs.num_layers();
    let n = covs.dim();
    let offdiag_upper = cfg.admissible_set.offdiag_upper_bound();

    let mut z: Vec<DMatrix<f64>> = covs.covs().iter().map(initial_precision).collect();
    let mut r = z.clone();
    let mut u = vec![DMatrix::<f64>::zeros(n, n); k];
    let mut mu = cfg.step;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut vals = vec![0.0; k];

    for iter in 1..=cfg.max_iters {
        iterations = iter;
        for l in 0..k {
            let target = SymMatrix::from_symmetric(&z[l] - &u[l]);
            r[l] = prox_logdet(&target, &covs.covs()[l], mu)?.into_inner();
        }
        let z_old = z.clone();
        let (t1, t2) = (lambda1 / mu, lambda2 / mu);
        for j in 0..n {
            for i in 0..=j {
                for l in 0..k {
                    vals[l] = r[l][(i, j)] + u[l][(i, j)];
                }
                if i == j {
                    if cfg.penalize_diagonal {
                        for v in vals.iter_mut() {
                            *v = soft(*v, t1);
                        }
                    }
                } else {
                    group_prox_in_place(&mut vals, t1, t2, offdiag_upper);
                }
                for l in 0..k {
                    z[l][(i, j)] = vals[l];
                    z[l][(j, i)] = vals[l];
                }
            }
        }
        let mut primal_sq = 0.0;
        let mut dual_sq = 0.0;
        let mut scale_sq = (0.0f64, 0.0f64);
        let mut u_sq = 0.0;
        for l in 0..k {
            let res = &r[l] - &z[l];
            primal_sq += res.norm_squared();
            u[l] += &res;
            dual_sq += (&z[l] - &z_old[l]).norm_squared();
            scale_sq.0 += r[l].norm_squared();
            scale_sq.1 += z[l].norm_squared();
            u_sq += u[l].norm_squared();
        }
        let primal = primal_sq.sqrt() / scale_sq.0.max(scale_sq.1).sqrt().max(1.0);
        let dual = mu * dual_sq.sqrt() / (mu * u_sq.sqrt()).max(1.0);
        if !primal.is_finite() || !dual.is_finite() {
            return Err(Error::numerical("ADMM iterates diverged"));
        }
        history.push((primal, dual));
        if primal <= cfg.tol_primal && dual <= cfg.tol_dual {
            converged = true;
            break;
        }
        if cfg.adapt_step {
            if primal > 10.0 * dual {
                mu *= 2.0;
                u.iter_mut().for_each(|m| *m *= 0.5);
            } else if dual > 10.0 * primal {
                mu *= 0.5;
                u.iter_mut().for_each(|m| *m *= 2.0);
            }
        }
    }

    let s_hat: Vec<SymMatrix> = z.into_iter().map(SymMatrix::from_symmetric).collect();
    for s in &s_hat {
        check_pd_floor(s, None, cfg.pd_floor)?;
    }
    let objective = ggl_objective(&s_hat, covs, lambda1, lambda2, cfg.penalize_diagonal);
    Ok(GglEstimate {
        s_hat,
        objective,
        iterations,
        converged,
        residual_history: history,
    })
}

/// Graphical lasso: maximizes `log det S - tr(C S) - lambda ||S||_1`.
pub fn solve_gl(cov: &SymMatrix, lambda: f64, cfg: &SolverConfig) -> Result<SymMatrix> {
    let covs = ObservedCovariances::from_matrices(vec![cov.clone()])?;
    let mut est = solve_ggl(&covs, lambda, 0.0, cfg)?;
    Ok(est.s_hat.remove(0))
}
