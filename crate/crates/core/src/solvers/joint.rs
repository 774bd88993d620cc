//! Consensus ADMM for the joint latent-variable estimator.
//!
//! Splitting, per layer `k`: the smooth block `R_k = S_k - P_k` goes through the
//! log-det prox, a copy `Z1_k = S_k` carries the sparsity and cross-layer fusion
//! penalties on `S`, a copy `Z2_k = P_k` carries the trace penalty and the PSD cone,
//! and a copy `Z3_k = P_k` carries the cross-layer fusion of `P`. The `(S, P)` block
//! is a small entrywise least-squares problem, so every iteration is two proper ADMM
//! blocks with closed-form (or exactly solved) updates.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::kernels::{fused_prox_per_layer, prox_logdet, prox_psd_trace, PairWeights, SymMatrix};
use crate::sampling::ObservedCovariances;

use super::objective::joint_objective;
use super::{check_pd_floor, JointEstimate, PenaltyWeights, SolverConfig};

struct State {
    s: Vec<DMatrix<f64>>,
    p: Vec<DMatrix<f64>>,
    r: Vec<DMatrix<f64>>,
    z1: Vec<DMatrix<f64>>,
    z2: Vec<DMatrix<f64>>,
    z3: Vec<DMatrix<f64>>,
    u_r: Vec<DMatrix<f64>>,
    u1: Vec<DMatrix<f64>>,
    u2: Vec<DMatrix<f64>>,
    u3: Vec<DMatrix<f64>>,
}

impl State {
    fn new(covs: &ObservedCovariances) -> Self {
        let k = covs.num_layers();
        let n = covs.dim();
        let start: Vec<DMatrix<f64>> = covs.covs().iter().map(initial_precision).collect();
        let zeros = vec![DMatrix::zeros(n, n); k];
        State {
            s: start.clone(),
            p: zeros.clone(),
            r: start.clone(),
            z1: start,
            z2: zeros.clone(),
            z3: zeros.clone(),
            u_r: zeros.clone(),
            u1: zeros.clone(),
            u2: zeros.clone(),
            u3: zeros,
        }
    }

    fn scale_duals(&mut self, factor: f64) {
        for u in self
            .u_r
            .iter_mut()
            .chain(self.u1.iter_mut())
            .chain(self.u2.iter_mut())
            .chain(self.u3.iter_mut())
        {
            *u *= factor;
        }
    }
}

/// `diag(1 / C_ii)`, a cheap positive definite starting point on the data's scale.
pub(super) fn initial_precision(c: &SymMatrix) -> DMatrix<f64> {
    let n = c.dim();
    let mean_diag = (c.trace() / n as f64).max(f64::MIN_POSITIVE);
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = c.get(i, i);
            1.0 / if d > 1e-12 * mean_diag { d } else { mean_diag }
        } else {
            0.0
        }
    })
}

fn sq(m: &DMatrix<f64>) -> f64 {
    m.norm_squared()
}

pub(super) fn check_covariances(covs: &ObservedCovariances) -> Result<()> {
    for (k, c) in covs.covs().iter().enumerate() {
        if c.min_eigenvalue()? < -1e-8 * c.frobenius_norm().max(1.0) {
            return Err(Error::invalid(format!(
                "covariance {k} is not positive semidefinite"
            )));
        }
    }
    Ok(())
}

/// Over-relaxation factor of the ADMM iteration.
const RELAX: f64 = 1.6;

/// Joint estimate of `K` observed-block precisions and their hidden-node corrections.
pub fn solve_joint_hidden(
    covs: &ObservedCovariances,
    w: &PenaltyWeights,
    cfg: &SolverConfig,
) -> Result<JointEstimate> {
    cfg.validate()?;
    let k = covs.num_layers();
    if w.num_layers() != k {
        return Err(Error::invalid(format!(
            "weights cover {} layers but there are {k} covariances",
            w.num_layers()
        )));
    }
    check_covariances(covs)?;
    let n = covs.dim();
    let offdiag_upper = cfg.admissible_set.offdiag_upper_bound();
    let mut st = State::new(covs);
    let mut mu = cfg.step;
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;

    let mut vals = vec![0.0; k];
    let mut lambdas = vec![0.0; k];
    let zero_l1 = vec![0.0; k];

    for iter in 1..=cfg.max_iters {
        iterations = iter;

        // (S, P) block: minimizes the sum of the four quadratic coupling terms.
        for l in 0..k {
            let (s, p) = (&mut st.s[l], &mut st.p[l]);
            for idx in 0..n * n {
                let a = st.r[l][idx] - st.u_r[l][idx];
                let b = st.z1[l][idx] - st.u1[l][idx];
                let c = st.z2[l][idx] - st.u2[l][idx];
                let d = st.z3[l][idx] - st.u3[l][idx];
                let pv = (2.0 * (c + d) - a + b) / 5.0;
                p[idx] = pv;
                s[idx] = 0.5 * (a + b + pv);
            }
        }

        let r_old = st.r.clone();
        let z1_old = st.z1.clone();
        let z2_old = st.z2.clone();
        let z3_old = st.z3.clone();

        // Over-relaxed images of the (S, P) block in each consensus constraint.
        let hat_r: Vec<DMatrix<f64>> = (0..k)
            .map(|l| (&st.s[l] - &st.p[l]) * RELAX + &r_old[l] * (1.0 - RELAX))
            .collect();
        let hat_1: Vec<DMatrix<f64>> = (0..k)
            .map(|l| &st.s[l] * RELAX + &z1_old[l] * (1.0 - RELAX))
            .collect();
        let hat_2: Vec<DMatrix<f64>> = (0..k)
            .map(|l| &st.p[l] * RELAX + &z2_old[l] * (1.0 - RELAX))
            .collect();
        let hat_3: Vec<DMatrix<f64>> = (0..k)
            .map(|l| &st.p[l] * RELAX + &z3_old[l] * (1.0 - RELAX))
            .collect();

        // R block: log-det prox per layer.
        for l in 0..k {
            let target = SymMatrix::from_symmetric(&hat_r[l] + &st.u_r[l]);
            st.r[l] = prox_logdet(&target, &covs.covs()[l], mu)?.into_inner();
        }

        // Z1 block: sparsity + fusion on S, entry by entry across layers.
        let rho_pair = w.rho_pair.scaled(1.0 / mu);
        for j in 0..n {
            for i in 0..=j {
                for l in 0..k {
                    vals[l] = hat_1[l][(i, j)] + st.u1[l][(i, j)];
                }
                if i == j && !cfg.penalize_diagonal {
                    // Diagonal is unpenalized and unconstrained.
                } else {
                    for l in 0..k {
                        lambdas[l] = w.rho[l] / mu;
                    }
                    let upper = if i == j { None } else { offdiag_upper };
                    fused_prox_per_layer(&mut vals, &lambdas, &rho_pair, upper);
                }
                for l in 0..k {
                    st.z1[l][(i, j)] = vals[l];
                    st.z1[l][(j, i)] = vals[l];
                }
            }
        }

        // Z2 block: trace penalty on the PSD cone.
        for l in 0..k {
            let target = SymMatrix::from_symmetric(&hat_2[l] + &st.u2[l]);
            st.z2[l] = prox_psd_trace(&target, w.beta[l] / mu)?.into_inner();
        }

        // Z3 block: fusion on P over every entry.
        let beta_pair: PairWeights = w.beta_pair.scaled(1.0 / mu);
        let fuse_p = k > 1 && !beta_pair.is_zero();
        for j in 0..n {
            for i in 0..=j {
                for l in 0..k {
                    vals[l] = hat_3[l][(i, j)] + st.u3[l][(i, j)];
                }
                if fuse_p {
                    fused_prox_per_layer(&mut vals, &zero_l1, &beta_pair, None);
                }
                for l in 0..k {
                    st.z3[l][(i, j)] = vals[l];
                    st.z3[l][(j, i)] = vals[l];
                }
            }
        }

        // Scaled dual ascent and residuals.
        let mut primal_sq = 0.0;
        let mut dual_sq = 0.0;
        let mut ax_sq = 0.0;
        let mut z_sq = 0.0;
        let mut aty_sq = 0.0;
        for l in 0..k {
            let s_minus_p = &st.s[l] - &st.p[l];
            let res_r = &s_minus_p - &st.r[l];
            let res_1 = &st.s[l] - &st.z1[l];
            let res_2 = &st.p[l] - &st.z2[l];
            let res_3 = &st.p[l] - &st.z3[l];
            primal_sq += sq(&res_r) + sq(&res_1) + sq(&res_2) + sq(&res_3);
            st.u_r[l] += &hat_r[l] - &st.r[l];
            st.u1[l] += &hat_1[l] - &st.z1[l];
            st.u2[l] += &hat_2[l] - &st.z2[l];
            st.u3[l] += &hat_3[l] - &st.z3[l];

            let d_r = &st.r[l] - &r_old[l];
            let d_1 = &st.z1[l] - &z1_old[l];
            let d_2 = &st.z2[l] - &z2_old[l];
            let d_3 = &st.z3[l] - &z3_old[l];
            dual_sq += sq(&(&d_r + &d_1)) + sq(&(&d_2 + &d_3 - &d_r));

            ax_sq += sq(&s_minus_p) + sq(&st.s[l]) + 2.0 * sq(&st.p[l]);
            z_sq += sq(&st.r[l]) + sq(&st.z1[l]) + sq(&st.z2[l]) + sq(&st.z3[l]);
            aty_sq += sq(&(&st.u_r[l] + &st.u1[l])) + sq(&(&st.u2[l] + &st.u3[l] - &st.u_r[l]));
        }
        let primal = primal_sq.sqrt() / ax_sq.max(z_sq).sqrt().max(1.0);
        let dual = mu * dual_sq.sqrt() / (mu * aty_sq.sqrt()).max(1.0);
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
                st.scale_duals(0.5);
            } else if dual > 10.0 * primal {
                mu *= 0.5;
                st.scale_duals(2.0);
            }
        }
    }

    let s_hat: Vec<SymMatrix> = st.z1.into_iter().map(SymMatrix::from_symmetric).collect();
    let p_hat: Vec<SymMatrix> = st.z2.into_iter().map(SymMatrix::from_symmetric).collect();
    for (s, p) in s_hat.iter().zip(&p_hat) {
        check_pd_floor(s, Some(p), cfg.pd_floor)?;
    }
    let objective = joint_objective(&s_hat, &p_hat, covs, w, cfg.penalize_diagonal);
    if !objective.is_finite() {
        return Err(Error::numerical(
            "objective is not finite at the returned estimate",
        ));
    }
    Ok(JointEstimate {
        s_hat,
        p_hat,
        objective,
        iterations,
        converged,
        residual_history: history,
    })
}

/// Single-graph latent-variable graphical lasso; returns `(Ŝ_O, P̂)`.
pub fn solve_lvgl(
    cov: &SymMatrix,
    rho: f64,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<(SymMatrix, SymMatrix)> {
    let covs = ObservedCovariances::from_matrices(vec![cov.clone()])?;
    let w = PenaltyWeights::tied(1, rho, beta, 0.0, 0.0)?;
    let est = solve_joint_hidden(&covs, &w, cfg)?;
    let mut s = est.s_hat;
    let mut p = est.p_hat;
    Ok((s.remove(0), p.remove(0)))
}
