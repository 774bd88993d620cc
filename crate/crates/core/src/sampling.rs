//! Zero-mean GMRF signal generation and observed sample covariances.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::{BlockPartition, MultiLayerFamily};
use crate::kernels::{symmetrize_in_place, SymMatrix};
use crate::rng::{derive_seed, seeded};

/// Per-layer signal matrices, each `N x M_k` with one signal per column.
#[derive(Clone, Debug)]
pub struct SampleSet {
    signals: Vec<DMatrix<f64>>,
}

impl SampleSet {
    pub fn new(signals: Vec<DMatrix<f64>>) -> Result<Self> {
        let first = signals
            .first()
            .ok_or_else(|| Error::invalid("sample set needs at least one layer"))?;
        let n = first.nrows();
        if signals.iter().any(|x| x.nrows() != n) {
            return Err(Error::invalid(
                "all layers must have the same number of nodes",
            ));
        }
        if signals.iter().any(|x| x.ncols() == 0) {
            return Err(Error::invalid("every layer needs at least one signal"));
        }
        Ok(SampleSet { signals })
    }

    /// Draws `m` signals per layer; layer `k` uses the seed derived from `(base_seed, k)`.
    pub fn draw(family: &MultiLayerFamily, m: usize, base_seed: u64) -> Result<Self> {
        let signals = family
            .layers
            .iter()
            .enumerate()
            .map(|(k, layer)| sample_gmrf(&layer.precision, m, derive_seed(base_seed, &[k as u64])))
            .collect::<Result<Vec<_>>>()?;
        SampleSet::new(signals)
    }

    pub fn signals(&self) -> &[DMatrix<f64>] {
        &self.signals
    }

    pub fn sample_counts(&self) -> Vec<usize> {
        self.signals.iter().map(|x| x.ncols()).collect()
    }

    pub fn observed_covariances(&self, part: &BlockPartition) -> Result<ObservedCovariances> {
        let covs = self
            .signals
            .iter()
            .map(|x| observed_sample_cov(x, part))
            .collect::<Result<Vec<_>>>()?;
        ObservedCovariances::new(covs, self.sample_counts())
    }
}

/// Observed-block sample covariances `Ĉ_O^(k)` for `K` layers.
#[derive(Clone, Debug)]
pub struct ObservedCovariances {
    covs: Vec<SymMatrix>,
    sample_counts: Vec<usize>,
}

impl ObservedCovariances {
    pub fn new(covs: Vec<SymMatrix>, sample_counts: Vec<usize>) -> Result<Self> {
        if covs.is_empty() {
            return Err(Error::invalid("need at least one covariance"));
        }
        if covs.len() != sample_counts.len() {
            return Err(Error::invalid("one sample count per layer is required"));
        }
        let dim = covs[0].dim();
        if covs.iter().any(|c| c.dim() != dim) {
            return Err(Error::invalid("covariances must share a dimension"));
        }
        if covs.iter().any(|c| !c.is_finite()) {
            return Err(Error::invalid("covariance has non-finite entries"));
        }
        Ok(ObservedCovariances {
            covs,
            sample_counts,
        })
    }

    /// Covariances without sample-count bookkeeping (counts recorded as 0).
    pub fn from_matrices(covs: Vec<SymMatrix>) -> Result<Self> {
        let n = covs.len();
        Self::new(covs, vec![0; n])
    }

    pub fn num_layers(&self) -> usize {
        self.covs.len()
    }

    pub fn dim(&self) -> usize {
        self.covs[0].dim()
    }

    pub fn covs(&self) -> &[SymMatrix] {
        &self.covs
    }

    pub fn sample_counts(&self) -> &[usize] {
        &self.sample_counts
    }

    /// A single layer, as a one-layer collection.
    pub fn layer(&self, k: usize) -> ObservedCovariances {
        ObservedCovariances {
            covs: vec![self.covs[k].clone()],
            sample_counts: vec![self.sample_counts[k]],
        }
    }
}

/// `m` i.i.d. draws from `N(0, S^{-1})`: with `S = L Lᵀ`, each column solves `Lᵀ x = z`
/// for a standard normal `z`.
pub fn sample_gmrf(precision: &SymMatrix, m: usize, rng_seed: u64) -> Result<DMatrix<f64>> {
    if m == 0 {
        return Err(Error::invalid("number of samples must be at least 1"));
    }
    let n = precision.dim();
    let chol = precision
        .as_matrix()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numerical("precision matrix is not positive definite"))?;
    let mut rng = seeded(rng_seed);
    let z = DMatrix::from_fn(n, m, |_, _| rng.sample::<f64, _>(StandardNormal));
    let lt = chol.l().transpose();
    lt.solve_upper_triangular(&z)
        .ok_or_else(|| Error::numerical("singular Cholesky factor"))
}

/// `(1/M) X_O X_Oᵀ` without centering.
pub fn observed_sample_cov(x: &DMatrix<f64>, part: &BlockPartition) -> Result<SymMatrix> {
    if x.nrows() != part.n_nodes() {
        return Err(Error::invalid(format!(
            "signals have {} rows but the partition covers {} nodes",
            x.nrows(),
            part.n_nodes()
        )));
    }
    if x.ncols() == 0 {
        return Err(Error::invalid("no signals"));
    }
    let xo = x.select_rows(part.observed());
    let mut c = (&xo * xo.transpose()) / x.ncols() as f64;
    symmetrize_in_place(&mut c);
    SymMatrix::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empirical_cov(x: &DMatrix<f64>) -> SymMatrix {
        observed_sample_cov(x, &BlockPartition::all_observed(x.nrows())).unwrap()
    }

    #[test]
    fn identity_precision_gives_unit_covariance() {
        let x = sample_gmrf(&SymMatrix::identity(3), 100_000, 1).unwrap();
        let c = empirical_cov(&x);
        assert!(c.max_abs_diff(&SymMatrix::identity(3)) < 0.03);
    }

    #[test]
    fn scalar_variance_is_inverse_precision() {
        let x = sample_gmrf(&SymMatrix::from_diagonal(&[4.0]), 100_000, 2).unwrap();
        let var = empirical_cov(&x).get(0, 0);
        assert!((var - 0.25).abs() < 0.01, "variance {var}");
    }

    #[test]
    fn sampling_is_reproducible() {
        let s = SymMatrix::from_row_slice(2, &[2.0, -0.5, -0.5, 1.0]).unwrap();
        assert_eq!(
            sample_gmrf(&s, 50, 9).unwrap(),
            sample_gmrf(&s, 50, 9).unwrap()
        );
        assert_ne!(
            sample_gmrf(&s, 50, 9).unwrap(),
            sample_gmrf(&s, 50, 10).unwrap()
        );
        let bad = SymMatrix::from_diagonal(&[1.0, -1.0]);
        assert!(matches!(sample_gmrf(&bad, 5, 0), Err(Error::Numerical(_))));
        assert!(sample_gmrf(&s, 0, 0).is_err());
    }

    #[test]
    fn observed_covariance_examples() {
        let x = DMatrix::from_column_slice(3, 1, &[1.0, 1.0, 7.0]);
        let part = BlockPartition::new(vec![0, 1], vec![2]).unwrap();
        let c = observed_sample_cov(&x, &part).unwrap();
        assert_eq!(
            c,
            SymMatrix::from_row_slice(2, &[1.0, 1.0, 1.0, 1.0]).unwrap()
        );
        let zero = observed_sample_cov(&DMatrix::zeros(3, 4), &part).unwrap();
        assert_eq!(zero, SymMatrix::zeros(2));
        assert!(observed_sample_cov(&DMatrix::zeros(2, 4), &part).is_err());
    }

    #[test]
    fn law_of_large_numbers_on_observed_block() {
        let part = BlockPartition::new(vec![0, 2, 3], vec![1]).unwrap();
        let mut worst = 0.0f64;
        let mut total = 0.0;
        for seed in 0..5 {
            let x = sample_gmrf(&SymMatrix::identity(4), 10_000, seed).unwrap();
            let err = observed_sample_cov(&x, &part)
                .unwrap()
                .max_abs_diff(&SymMatrix::identity(3));
            worst = worst.max(err);
            total += err;
        }
        assert!(total / 5.0 < 0.05, "mean max-entry error {}", total / 5.0);
        assert!(worst < 0.1);
    }

    #[test]
    fn covariance_is_psd_with_generic_rank() {
        let part = BlockPartition::all_observed(6);
        for m in [2usize, 4, 10] {
            let x = sample_gmrf(&SymMatrix::identity(6), m, m as u64).unwrap();
            let c = observed_sample_cov(&x, &part).unwrap();
            let e = c.eigh().unwrap();
            assert!(e.eigenvalues[0] >= -1e-10);
            let rank = e.eigenvalues.iter().filter(|&&l| l > 1e-10).count();
            assert_eq!(rank, m.min(6));
        }
    }
}
