use nalgebra::DMatrix;
use rand::seq::index::sample;

use crate::error::{Error, Result};
use crate::kernels::{symmetrize_in_place, SymMatrix};
use crate::rng::seeded;

/// Ordered observed and hidden index sets over `0..n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockPartition {
    observed: Vec<usize>,
    hidden: Vec<usize>,
}

impl BlockPartition {
    pub fn new(observed: Vec<usize>, hidden: Vec<usize>) -> Result<Self> {
        if observed.is_empty() {
            return Err(Error::invalid("at least one node must be observed"));
        }
        let n = observed.len() + hidden.len();
        let mut seen = vec![false; n];
        for &i in observed.iter().chain(hidden.iter()) {
            if i >= n || seen[i] {
                return Err(Error::invalid(format!(
                    "observed and hidden sets must partition 0..{n}"
                )));
            }
            seen[i] = true;
        }
        Ok(BlockPartition { observed, hidden })
    }

    /// Everything observed.
    pub fn all_observed(n: usize) -> Self {
        BlockPartition {
            observed: (0..n).collect(),
            hidden: Vec::new(),
        }
    }

    pub fn observed(&self) -> &[usize] {
        &self.observed
    }

    pub fn hidden(&self) -> &[usize] {
        &self.hidden
    }

    pub fn n_nodes(&self) -> usize {
        self.observed.len() + self.hidden.len()
    }

    /// Observed indices followed by hidden ones.
    pub fn permutation(&self) -> Vec<usize> {
        self.observed
            .iter()
            .chain(self.hidden.iter())
            .copied()
            .collect()
    }

    /// The estimators assume far fewer hidden than observed nodes; returns a warning
    /// message when that clearly does not hold.
    pub fn few_hidden_warning(&self) -> Option<String> {
        (self.hidden.len() >= self.observed.len()).then(|| {
            format!(
                "{} hidden nodes vs {} observed: latent-variable estimates are poorly posed",
                self.hidden.len(),
                self.observed.len()
            )
        })
    }
}

/// Hides a uniformly random subset of `n_hidden` nodes. Both index lists are sorted.
pub fn choose_hidden(n: usize, n_hidden: usize, rng_seed: u64) -> Result<BlockPartition> {
    if n_hidden >= n {
        return Err(Error::invalid(format!(
            "cannot hide {n_hidden} of {n} nodes: at least one must stay observed"
        )));
    }
    let mut rng = seeded(rng_seed);
    let mut hidden: Vec<usize> = sample(&mut rng, n, n_hidden).into_vec();
    hidden.sort_unstable();
    let observed = (0..n)
        .filter(|i| hidden.binary_search(i).is_err())
        .collect();
    BlockPartition::new(observed, hidden)
}

/// The blocks `S_O`, `S_OH` and `S_H` of a matrix under a partition.
#[derive(Clone, Debug)]
pub struct BlockView {
    pub observed: SymMatrix,
    /// `|O| x |H|`; empty when nothing is hidden.
    pub cross: DMatrix<f64>,
    /// `|H| x |H|`; empty when nothing is hidden.
    pub hidden: DMatrix<f64>,
}

impl BlockView {
    /// Reassembles the permuted matrix `[[S_O, S_OH], [S_HO, S_H]]`.
    pub fn assemble(&self) -> SymMatrix {
        let o = self.observed.dim();
        let h = self.hidden.nrows();
        let mut m = DMatrix::zeros(o + h, o + h);
        m.view_mut((0, 0), (o, o))
            .copy_from(self.observed.as_matrix());
        if h > 0 {
            m.view_mut((0, o), (o, h)).copy_from(&self.cross);
            m.view_mut((o, 0), (h, o))
                .copy_from(&self.cross.transpose());
            m.view_mut((o, o), (h, h)).copy_from(&self.hidden);
        }
        SymMatrix::new(m).expect("square")
    }
}

pub fn block_view(s: &SymMatrix, part: &BlockPartition) -> Result<BlockView> {
    if s.dim() != part.n_nodes() {
        return Err(Error::invalid(format!(
            "matrix has dim {} but the partition covers {} nodes",
            s.dim(),
            part.n_nodes()
        )));
    }
    let o = part.observed();
    let h = part.hidden();
    let m = s.as_matrix();
    Ok(BlockView {
        observed: s.submatrix(o)?,
        cross: DMatrix::from_fn(o.len(), h.len(), |r, c| m[(o[r], h[c])]),
        hidden: DMatrix::from_fn(h.len(), h.len(), |r, c| m[(h[r], h[c])]),
    })
}

/// Schur complement split of a precision matrix: returns `(S_O - P, P)` with
/// `P = S_OH S_H^{-1} S_HO`, the precision of the observed marginal and the low-rank
/// correction induced by the hidden nodes.
pub fn marginal_precision(s: &SymMatrix, part: &BlockPartition) -> Result<(SymMatrix, SymMatrix)> {
    let blocks = block_view(s, part)?;
    let o = blocks.observed.dim();
    if part.hidden().is_empty() {
        return Ok((blocks.observed, SymMatrix::zeros(o)));
    }
    let chol = blocks
        .hidden
        .clone()
        .cholesky()
        .ok_or_else(|| Error::numerical("hidden block S_H is not positive definite"))?;
    let solved = chol.solve(&blocks.cross.transpose());
    let mut p = &blocks.cross * solved;
    symmetrize_in_place(&mut p);
    let p = SymMatrix::new(p)?;
    let k_o = &blocks.observed - &p;
    Ok((k_o, p))
}
