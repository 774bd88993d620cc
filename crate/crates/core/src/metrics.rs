//! Scale-invariant estimation error and support-recovery scores.

use crate::error::{Error, Result};
use crate::kernels::SymMatrix;

/// Default relative threshold for declaring an estimated entry an edge.
pub const DEFAULT_F1_THRESHOLD: f64 = 0.1;

/// `‖A/‖A‖_F − B/‖B‖_F‖_F²` for one pair of matrices; lies in `[0, 4]`.
pub fn normalized_error(est: &SymMatrix, truth: &SymMatrix) -> Result<f64> {
    if est.dim() != truth.dim() {
        return Err(Error::invalid("estimate and truth dimensions differ"));
    }
    let e = est.as_matrix();
    let t = truth.as_matrix();
    let ne2 = e.dot(e);
    let nt2 = t.dot(t);
    if ne2 == 0.0 || !ne2.is_finite() {
        return Err(Error::DegenerateInput(
            "estimate has zero or non-finite Frobenius norm".into(),
        ));
    }
    if nt2 == 0.0 || !nt2.is_finite() {
        return Err(Error::DegenerateInput(
            "truth has zero or non-finite Frobenius norm".into(),
        ));
    }
    // Both normalized matrices have unit norm, so the distance is 2 - 2 cos.
    let cos = e.dot(t) / (ne2 * nt2).sqrt();
    Ok((2.0 - 2.0 * cos).max(0.0))
}

/// Mean over layers of [`normalized_error`].
pub fn mean_normalized_error(est: &[SymMatrix], truth: &[SymMatrix]) -> Result<f64> {
    Ok(mean(&per_layer_error(est, truth)?))
}

pub fn per_layer_error(est: &[SymMatrix], truth: &[SymMatrix]) -> Result<Vec<f64>> {
    if est.len() != truth.len() || est.is_empty() {
        return Err(Error::invalid(format!(
            "need matching nonempty lists, got {} estimates and {} truths",
            est.len(),
            truth.len()
        )));
    }
    est.iter()
        .zip(truth)
        .map(|(e, t)| normalized_error(e, t))
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn support(m: &SymMatrix, threshold: f64) -> Vec<bool> {
    let n = m.dim();
    let max = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .fold(0.0f64, |acc, (i, j)| acc.max(m.get(i, j).abs()));
    (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| max > 0.0 && m.get(i, j).abs() > threshold * max)
        .collect()
}

/// F1 score of off-diagonal support detection. An entry counts as an edge when its
/// magnitude exceeds `threshold` times the largest off-diagonal magnitude of its matrix
/// (the same rule is applied to both arguments). No predicted edges scores 0 unless the
/// truth has none either.
pub fn support_f1(est: &SymMatrix, truth: &SymMatrix, threshold: f64) -> Result<f64> {
    if est.dim() != truth.dim() {
        return Err(Error::invalid("estimate and truth dimensions differ"));
    }
    let pred = support(est, threshold);
    let real = support(truth, threshold);
    let tp = pred.iter().zip(&real).filter(|(p, r)| **p && **r).count();
    let n_pred = pred.iter().filter(|p| **p).count();
    let n_real = real.iter().filter(|r| **r).count();
    if n_pred == 0 && n_real == 0 {
        return Ok(1.0);
    }
    if tp == 0 {
        return Ok(0.0);
    }
    let precision = tp as f64 / n_pred as f64;
    let recall = tp as f64 / n_real as f64;
    Ok(2.0 * precision * recall / (precision + recall))
}

/// Evaluation of one method on one realization.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalReport {
    pub mean_error: f64,
    pub per_layer_error: Vec<f64>,
    pub support_f1: Vec<f64>,
    pub runtime_seconds: f64,
}

impl EvalReport {
    pub fn evaluate(
        est: &[SymMatrix],
        truth: &[SymMatrix],
        f1_threshold: f64,
        runtime_seconds: f64,
    ) -> Result<Self> {
        let per_layer_error = per_layer_error(est, truth)?;
        let support_f1 = est
            .iter()
            .zip(truth)
            .map(|(e, t)| support_f1(e, t, f1_threshold))
            .collect::<Result<Vec<_>>>()?;
        Ok(EvalReport {
            mean_error: mean(&per_layer_error),
            per_layer_error,
            support_f1,
            runtime_seconds,
        })
    }
}
