use rand::seq::index::sample;
use rand::Rng;

use crate::error::{Error, Result};
use crate::kernels::SymMatrix;
use crate::rng::seeded;

use super::{Graph, PrecisionGraph};

fn check_probability(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::invalid(format!(
            "{name} must lie in [0, 1], got {p}"
        )));
    }
    Ok(())
}

/// G(n, p): every unordered pair is an edge independently with probability `p`.
pub fn gen_erdos_renyi(n: usize, p: f64, rng_seed: u64) -> Result<Graph> {
    check_probability("link probability", p)?;
    if n == 0 {
        return Err(Error::invalid("graph must have at least one node"));
    }
    let mut rng = seeded(rng_seed);
    let mut g = Graph::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < p {
                g.set_edge(i, j, 1.0);
            }
        }
    }
    Ok(g)
}

/// Watts–Strogatz small-world graph.
///
/// Starts from a ring lattice where each node links to its `neighbors / 2` nearest
/// nodes on each side (an odd `neighbors` is rounded down, as in networkx), then
/// visits every lattice edge `(u, u + j)` and with probability `rewire_p` moves its
/// far end to a uniformly chosen node that is neither `u` nor already adjacent to it.
/// Rewiring never changes the edge count.
pub fn gen_small_world(n: usize, neighbors: usize, rewire_p: f64, rng_seed: u64) -> Result<Graph> {
    check_probability("rewiring probability", rewire_p)?;
    if neighbors >= n {
        return Err(Error::invalid(format!(
            "neighbors ({neighbors}) must be smaller than the node count ({n})"
        )));
    }
    let half = neighbors / 2;
    let mut g = Graph::empty(n);
    for j in 1..=half {
        for u in 0..n {
            g.set_edge(u, (u + j) % n, 1.0);
        }
    }
    let mut rng = seeded(rng_seed);
    for j in 1..=half {
        for u in 0..n {
            let v = (u + j) % n;
            if rng.random::<f64>() >= rewire_p {
                continue;
            }
            let candidates: Vec<usize> = (0..n).filter(|&w| w != u && !g.has_edge(u, w)).collect();
            if candidates.is_empty() || !g.has_edge(u, v) {
                continue;
            }
            let w = candidates[rng.random_range(0..candidates.len())];
            g.set_edge(u, v, 0.0);
            g.set_edge(u, w, 1.0);
        }
    }
    Ok(g)
}

/// `base` followed by `k - 1` variants, each with `n_rewire` uniformly chosen edges of
/// `base` removed and as many uniformly chosen non-edges of `base` inserted (weight 1).
pub fn gen_rewired_family(
    base: &Graph,
    k: usize,
    n_rewire: usize,
    rng_seed: u64,
) -> Result<Vec<Graph>> {
    if k == 0 {
        return Err(Error::invalid("family needs at least one layer"));
    }
    let edges = base.edges();
    let non_edges = base.non_edges();
    if n_rewire > edges.len() || n_rewire > non_edges.len() {
        return Err(Error::invalid(format!(
            "cannot rewire {n_rewire} edges: base has {} edges and {} non-edges",
            edges.len(),
            non_edges.len()
        )));
    }
    let mut rng = seeded(rng_seed);
    let mut family = vec![base.clone()];
    for _ in 1..k {
        let mut g = base.clone();
        for idx in sample(&mut rng, edges.len(), n_rewire) {
            let (i, j) = edges[idx];
            g.set_edge(i, j, 0.0);
        }
        for idx in sample(&mut rng, non_edges.len(), n_rewire) {
            let (i, j) = non_edges[idx];
            g.set_edge(i, j, 1.0);
        }
        family.push(g);
    }
    Ok(family)
}

/// Knobs for turning a graph into a ground-truth precision matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PrecisionParams {
    pub weight_lo: f64,
    pub weight_hi: f64,
    pub diag_margin: f64,
}

impl Default for PrecisionParams {
    fn default() -> Self {
        PrecisionParams {
            weight_lo: 0.5,
            weight_hi: 1.0,
            diag_margin: 0.1,
        }
    }
}

/// Attractive GMRF precision on `g`: `S_ij = -A_ij u_ij` with `u_ij ~ U(lo, hi)` on
/// edges, and a constant diagonal `|λ_min(offdiag)| + diag_margin`.
///
/// A weight is drawn for every unordered pair in row-major order whether or not it is
/// an edge, so graphs sharing an edge under the same seed also share its weight.
pub fn to_precision(g: &Graph, params: PrecisionParams, rng_seed: u64) -> Result<PrecisionGraph> {
    let PrecisionParams {
        weight_lo: lo,
        weight_hi: hi,
        diag_margin,
    } = params;
    if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::invalid(format!("invalid weight range ({lo}, {hi})")));
    }
    if !(diag_margin > 0.0) {
        return Err(Error::invalid("diag_margin must be positive"));
    }
    let n = g.n_nodes();
    let mut rng = seeded(rng_seed);
    let mut s = SymMatrix::zeros(n);
    for i in 0..n {
        for j in (i + 1)..n {
            let u = if lo == hi {
                lo
            } else {
                rng.random_range(lo..hi)
            };
            let a = g.adjacency().get(i, j);
            if a != 0.0 {
                s.set(i, j, -a * u);
            }
        }
    }
    let lam_min = s.min_eigenvalue()?;
    let diag = lam_min.abs() + diag_margin;
    for i in 0..n {
        s.set(i, i, diag);
    }
    PrecisionGraph::new(g.clone(), s)
}
