use crate::kernels::SymMatrix;
use crate::sampling::ObservedCovariances;

use super::PenaltyWeights;

/// `tr(R C) - log det R`, or `+inf` when `R` is not positive definite.
pub(crate) fn neg_log_likelihood(r: &SymMatrix, c: &SymMatrix) -> f64 {
    match r.log_det_pd() {
        Some(ld) => r.inner(c) - ld,
        None => f64::INFINITY,
    }
}

fn nuclear_norm(p: &SymMatrix) -> f64 {
    match p.eigh() {
        Ok(e) => e.eigenvalues.iter().map(|l| l.abs()).sum(),
        Err(_) => f64::NAN,
    }
}

/// Value of the joint latent-variable objective
///
/// `Σ_k [tr((S_k - P_k) C_k) - log det(S_k - P_k) + ρ_k ||S_k||_1 + β_k ||P_k||_*]
///   + Σ_{k<k'} [ρ_kk' ||S_k - S_k'||_1 + β_kk' ||P_k - P_k'||_1]`.
///
/// The l1 terms on `S` skip the diagonal unless `penalize_diagonal`; the fusion term on
/// `P` always covers every entry. Returns `+inf` if some `S_k - P_k` is not positive
/// definite.
pub fn joint_objective(
    s: &[SymMatrix],
    p: &[SymMatrix],
    covs: &ObservedCovariances,
    w: &PenaltyWeights,
    penalize_diagonal: bool,
) -> f64 {
    let k = covs.num_layers();
    assert!(
        s.len() == k && p.len() == k && w.num_layers() == k,
        "layer counts differ"
    );
    let mut total = 0.0;
    for l in 0..k {
        let r = &s[l] - &p[l];
        total += neg_log_likelihood(&r, &covs.covs()[l]);
        if !total.is_finite() {
            return f64::INFINITY;
        }
        total += w.rho[l] * s[l].l1_norm(penalize_diagonal);
        total += w.beta[l] * nuclear_norm(&p[l]);
    }
    for (a, b, wt) in w.rho_pair.iter() {
        if wt > 0.0 {
            total += wt * (&s[a] - &s[b]).l1_norm(penalize_diagonal);
        }
    }
    for (a, b, wt) in w.beta_pair.iter() {
        if wt > 0.0 {
            total += wt * (&p[a] - &p[b]).l1_norm(true);
        }
    }
    total
}

/// Group graphical lasso objective
/// `Σ_k [tr(S_k C_k) - log det S_k] + λ1 Σ_k ||S_k||_1 + λ2 Σ_{i≠j} ||(S_1,ij, ..., S_K,ij)||_2`.
pub fn ggl_objective(
    s: &[SymMatrix],
    covs: &ObservedCovariances,
    lambda1: f64,
    lambda2: f64,
    penalize_diagonal: bool,
) -> f64 {
    let k = covs.num_layers();
    assert_eq!(s.len(), k, "layer counts differ");
    let mut total = 0.0;
    for l in 0..k {
        total += neg_log_likelihood(&s[l], &covs.covs()[l]);
        if !total.is_finite() {
            return f64::INFINITY;
        }
        total += lambda1 * s[l].l1_norm(penalize_diagonal);
    }
    if lambda2 > 0.0 {
        let n = covs.dim();
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    total += lambda2 * s.iter().map(|m| m.get(i, j).powi(2)).sum::<f64>().sqrt();
                }
            }
        }
    }
    total
}
