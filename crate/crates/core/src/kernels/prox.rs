//! Proximal operators for the terms of the penalized log-likelihood objectives.

use crate::error::{Error, Result};

use super::sym::{eigh, SymMatrix};

/// Sweep cap for the dual coordinate solver used by [`prox_fused_l1`] when `K >= 3`.
const FUSED_MAX_SWEEPS: usize = 20_000;
const FUSED_TOL: f64 = 1e-13;

#[inline]
pub fn soft(x: f64, lambda: f64) -> f64 {
    if x > lambda {
        x - lambda
    } else if x < -lambda {
        x + lambda
    } else {
        0.0
    }
}

/// `argmin_R { tr(c R) - log det R + (tau/2) ||R - a||_F^2 }`.
///
/// Closed form through the eigendecomposition of `a - c/tau`: each eigenvalue `g`
/// maps to the positive root of `tau r^2 - tau g r - 1 = 0`.
pub fn prox_logdet(a: &SymMatrix, c: &SymMatrix, tau: f64) -> Result<SymMatrix> {
    if !(tau > 0.0) || !tau.is_finite() {
        return Err(Error::invalid(format!(
            "prox_logdet: tau must be positive, got {tau}"
        )));
    }
    if a.dim() != c.dim() {
        return Err(Error::invalid(format!(
            "prox_logdet: dimension mismatch {} vs {}",
            a.dim(),
            c.dim()
        )));
    }
    let shifted = a - &c.scale(1.0 / tau);
    let e = eigh(&shifted)?;
    let four_over_tau = 4.0 / tau;
    Ok(e.map_spectrum(|g| logdet_root(g, four_over_tau)))
}

#[inline]
fn logdet_root(g: f64, four_over_tau: f64) -> f64 {
    let disc = (g * g + four_over_tau).sqrt();
    if g >= 0.0 {
        0.5 * (g + disc)
    } else {
        // Same root, written without the cancellation in g + disc.
        0.5 * four_over_tau / (disc - g)
    }
}

/// Element-wise soft thresholding; the diagonal is left untouched unless
/// `penalize_diagonal` is set.
pub fn soft_threshold(a: &SymMatrix, lambda: f64, penalize_diagonal: bool) -> Result<SymMatrix> {
    if !(lambda >= 0.0) {
        return Err(Error::invalid(format!(
            "soft_threshold: lambda must be nonnegative, got {lambda}"
        )));
    }
    let mut out = a.clone();
    let n = a.dim();
    for j in 0..n {
        for i in 0..=j {
            if i == j && !penalize_diagonal {
                continue;
            }
            out.set(i, j, soft(a.get(i, j), lambda));
        }
    }
    Ok(out)
}

/// Prox of `kappa * ||P||_*` restricted to the PSD cone, i.e. of `kappa * tr(P) + I(P >= 0)`.
pub fn prox_psd_trace(a: &SymMatrix, kappa: f64) -> Result<SymMatrix> {
    if !(kappa >= 0.0) {
        return Err(Error::invalid(format!(
            "prox_psd_trace: kappa must be nonnegative, got {kappa}"
        )));
    }
    let e = eigh(a)?;
    Ok(e.map_spectrum(|l| (l - kappa).max(0.0)))
}

/// Nonnegative weights on the unordered pairs `k < k'` of `K` layers.
#[derive(Clone, Debug, PartialEq)]
pub struct PairWeights {
    k: usize,
    w: Vec<f64>,
}

impl PairWeights {
    /// `weights` lists pairs in lexicographic order: (0,1), (0,2), ..., (1,2), ...
    pub fn new(k: usize, weights: Vec<f64>) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("number of layers must be at least 1"));
        }
        let expected = k * (k - 1) / 2;
        if weights.len() != expected {
            return Err(Error::invalid(format!(
                "expected {expected} pair weights for {k} layers, got {}",
                weights.len()
            )));
        }
        if let Some(bad) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid(format!(
                "pair weight must be nonnegative, got {bad}"
            )));
        }
        Ok(PairWeights { k, w: weights })
    }

    pub fn uniform(k: usize, weight: f64) -> Result<Self> {
        Self::new(k, vec![weight; k * k.saturating_sub(1) / 2])
    }

    pub fn zeros(k: usize) -> Self {
        PairWeights {
            k,
            w: vec![0.0; k * k.saturating_sub(1) / 2],
        }
    }

    pub fn num_layers(&self) -> usize {
        self.k
    }

    fn index(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a < b { (a, b) } else { (b, a) };
        a * self.k - a * (a + 1) / 2 + (b - a - 1)
    }

    /// Weight of the pair `{a, b}`; symmetric in its arguments.
    pub fn get(&self, a: usize, b: usize) -> f64 {
        assert!(a != b && a < self.k && b < self.k);
        self.w[self.index(a, b)]
    }

    /// Iterates `(a, b, weight)` with `a < b`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        let k = self.k;
        (0..k)
            .flat_map(move |a| ((a + 1)..k).map(move |b| (a, b)))
            .zip(self.w.iter())
            .map(|((a, b), &w)| (a, b, w))
    }

    /// The common weight when every pair carries the same one.
    pub(crate) fn uniform_weight(&self) -> Option<f64> {
        let first = *self.w.first()?;
        self.w.iter().all(|&v| v == first).then_some(first)
    }

    pub fn is_zero(&self) -> bool {
        self.w.iter().all(|&w| w == 0.0)
    }

    pub fn scaled(&self, c: f64) -> PairWeights {
        PairWeights {
            k: self.k,
            w: self.w.iter().map(|w| w * c).collect(),
        }
    }

    /// Same weights, with layers relabeled so that new layer `i` is old layer `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> PairWeights {
        let mut w = Vec::with_capacity(self.w.len());
        for a in 0..self.k {
            for b in (a + 1)..self.k {
                w.push(self.get(perm[a], perm[b]));
            }
        }
        PairWeights { k: self.k, w }
    }
}

/// `argmin_z { ½||z - values||² + lambda1 ||z||_1 + Σ_{k<k'} w_kk' |z_k - z_k'| }`.
pub fn prox_fused_l1(values: &[f64], lambda1: f64, pair_weights: &PairWeights) -> Result<Vec<f64>> {
    if values.len() != pair_weights.num_layers() {
        return Err(Error::invalid(format!(
            "prox_fused_l1: {} values but weights for {} layers",
            values.len(),
            pair_weights.num_layers()
        )));
    }
    if !(lambda1 >= 0.0) {
        return Err(Error::invalid(format!(
            "prox_fused_l1: lambda1 must be nonnegative, got {lambda1}"
        )));
    }
    let mut out = values.to_vec();
    fused_prox_in_place(&mut out, lambda1, pair_weights, None);
    Ok(out)
}

/// In-place fused prox. With `upper = Some(u)` the problem additionally constrains
/// every coordinate to `z_k <= u`.
///
/// The pairwise term is handled first and the separable parts are applied afterwards:
/// both soft thresholding and clipping to a common bound preserve the ordering of the
/// coordinates, so they commute with the fusion prox.
pub(crate) fn fused_prox_in_place(
    z: &mut [f64],
    lambda1: f64,
    weights: &PairWeights,
    upper: Option<f64>,
) {
    debug_assert_eq!(z.len(), weights.num_layers());
    match z.len() {
        0 | 1 => {}
        2 => {
            let w = weights.w[0];
            let half_gap = 0.5 * (z[0] - z[1]);
            if half_gap.abs() <= w {
                let mean = 0.5 * (z[0] + z[1]);
                z[0] = mean;
                z[1] = mean;
            } else {
                let shift = w.copysign(half_gap);
                z[0] -= shift;
                z[1] += shift;
            }
        }
        _ => match weights.uniform_weight() {
            Some(w) => fusion_uniform(z, w),
            None => fusion_dual_cd(z, weights),
        },
    }
    if lambda1 > 0.0 {
        for v in z.iter_mut() {
            *v = soft(*v, lambda1);
        }
    }
    if let Some(u) = upper {
        for v in z.iter_mut() {
            *v = v.min(u);
        }
    }
}

/// Equal pair weights: the solution keeps the order of the input, on which the
/// pairwise term is linear, `w Σ_i (2i - K + 1) z_(i)` over the sorted coordinates.
/// What remains is an isotonic regression, solved exactly by pool-adjacent-violators.
fn fusion_uniform(z: &mut [f64], w: f64) {
    let k = z.len();
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| z[a].total_cmp(&z[b]));
    // Blocks of (sum, count) of the shifted sorted values.
    let mut blocks: Vec<(f64, usize)> = Vec::with_capacity(k);
    for (i, &idx) in order.iter().enumerate() {
        let mut block = (z[idx] - w * (2.0 * i as f64 - (k as f64 - 1.0)), 1);
        while let Some(&(s, c)) = blocks.last() {
            if s / c as f64 >= block.0 / block.1 as f64 {
                blocks.pop();
                block = (block.0 + s, block.1 + c);
            } else {
                break;
            }
        }
        blocks.push(block);
    }
    let mut pos = 0;
    for (s, c) in blocks {
        let mean = s / c as f64;
        for &idx in &order[pos..pos + c] {
            z[idx] = mean;
        }
        pos += c;
    }
}

/// Exact coordinate descent on the box-constrained dual of the pairwise fusion prox:
/// `z = v - Σ_e w_e u_e (e_a - e_b)`, `u_e ∈ [-1, 1]`. The dual is smooth with
/// separable constraints, so cyclic coordinate minimization converges to its optimum.
fn fusion_dual_cd(z: &mut [f64], weights: &PairWeights) {
    let pairs: Vec<(usize, usize, f64)> = weights.iter().filter(|p| p.2 > 0.0).collect();
    if pairs.is_empty() {
        return;
    }
    let scale = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut u = vec![0.0; pairs.len()];
    for _ in 0..FUSED_MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for (e, &(a, b, w)) in pairs.iter().enumerate() {
            let target = (u[e] + (z[a] - z[b]) / (2.0 * w)).clamp(-1.0, 1.0);
            let du = target - u[e];
            if du != 0.0 {
                u[e] = target;
                let dz = w * du;
                z[a] -= dz;
                z[b] += dz;
                max_step = max_step.max(dz.abs());
            }
        }
        if max_step <= FUSED_TOL * scale {
            break;
        }
    }
}

/// Fused prox with a separate l1 weight per coordinate. Equal weights take the
/// decomposed path of [`fused_prox_in_place`]; otherwise the l1 atoms and the bound
/// constraint join the pairwise atoms in one dual coordinate descent.
pub(crate) fn fused_prox_per_layer(
    z: &mut [f64],
    lambdas: &[f64],
    weights: &PairWeights,
    upper: Option<f64>,
) {
    debug_assert_eq!(z.len(), lambdas.len());
    let first = lambdas.first().copied().unwrap_or(0.0);
    if lambdas.iter().all(|&l| l == first) {
        fused_prox_in_place(z, first, weights, upper);
        return;
    }
    let pairs: Vec<(usize, usize, f64)> = weights.iter().filter(|p| p.2 > 0.0).collect();
    let scale = z.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut u = vec![0.0; pairs.len()];
    let mut t = vec![0.0; z.len()];
    let mut nu = vec![0.0; z.len()];
    for _ in 0..FUSED_MAX_SWEEPS {
        let mut max_step = 0.0f64;
        for (e, &(a, b, w)) in pairs.iter().enumerate() {
            let target = (u[e] + (z[a] - z[b]) / (2.0 * w)).clamp(-1.0, 1.0);
            let du = target - u[e];
            if du != 0.0 {
                u[e] = target;
                let dz = w * du;
                z[a] -= dz;
                z[b] += dz;
                max_step = max_step.max(dz.abs());
            }
        }
        for k in 0..z.len() {
            let lam = lambdas[k];
            if lam > 0.0 {
                let target = (t[k] + z[k] / lam).clamp(-1.0, 1.0);
                let dz = lam * (target - t[k]);
                if dz != 0.0 {
                    t[k] = target;
                    z[k] -= dz;
                    max_step = max_step.max(dz.abs());
                }
            }
            if let Some(ub) = upper {
                let target = (nu[k] + z[k] - ub).max(0.0);
                let dz = target - nu[k];
                if dz != 0.0 {
                    nu[k] = target;
                    z[k] -= dz;
                    max_step = max_step.max(dz.abs());
                }
            }
        }
        if max_step <= FUSED_TOL * scale {
            break;
        }
    }
}

/// Prox of `lambda1 ||z||_1 + lambda2 ||z||_2` on one entry across layers:
/// soft threshold, then shrink the whole vector toward zero.
pub fn group_soft_threshold(values: &[f64], lambda1: f64, lambda2: f64) -> Vec<f64> {
    let mut out = values.to_vec();
    group_prox_in_place(&mut out, lambda1, lambda2, None);
    out
}

pub(crate) fn group_prox_in_place(z: &mut [f64], lambda1: f64, lambda2: f64, upper: Option<f64>) {
    for v in z.iter_mut() {
        *v = soft(*v, lambda1);
        if let Some(u) = upper {
            *v = v.min(u);
        }
    }
    if lambda2 > 0.0 {
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        let factor = if norm > lambda2 {
            1.0 - lambda2 / norm
        } else {
            0.0
        };
        for v in z.iter_mut() {
            *v *= factor;
        }
    }
}
