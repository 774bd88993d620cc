//! Ground-truth graphs, precision matrices and the observed/hidden block structure.

mod blocks;
mod generate;

pub use blocks::{block_view, choose_hidden, marginal_precision, BlockPartition, BlockView};
pub use generate::{
    gen_erdos_renyi, gen_rewired_family, gen_small_world, to_precision, PrecisionParams,
};

use crate::error::{Error, Result};
use crate::kernels::SymMatrix;

/// Undirected weighted graph; `adjacency[(i, j)] > 0` exactly on edges.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    adjacency: SymMatrix,
}

impl Graph {
    pub fn empty(n_nodes: usize) -> Self {
        Graph {
            adjacency: SymMatrix::zeros(n_nodes),
        }
    }

    pub fn from_adjacency(adjacency: SymMatrix) -> Result<Self> {
        let n = adjacency.dim();
        for j in 0..n {
            if adjacency.get(j, j) != 0.0 {
                return Err(Error::invalid(format!("self-loop on node {j}")));
            }
            for i in 0..j {
                let w = adjacency.get(i, j);
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(Error::invalid(format!(
                        "edge ({i}, {j}) has invalid weight {w}"
                    )));
                }
            }
        }
        Ok(Graph { adjacency })
    }

    /// Builds a graph from 0-based `(i, j, weight)` triples.
    pub fn from_edges(n_nodes: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        if n_nodes == 0 {
            return Err(Error::invalid("graph must have at least one node"));
        }
        let mut g = Graph::empty(n_nodes);
        for &(i, j, w) in edges {
            if i >= n_nodes || j >= n_nodes {
                return Err(Error::invalid(format!("edge ({i}, {j}) out of range")));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop on node {i}")));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(Error::invalid(format!(
                    "edge ({i}, {j}) has invalid weight {w}"
                )));
            }
            if g.has_edge(i, j) {
                return Err(Error::invalid(format!("duplicate edge ({i}, {j})")));
            }
            g.adjacency.set(i, j, w);
        }
        Ok(g)
    }

    pub fn n_nodes(&self) -> usize {
        self.adjacency.dim()
    }

    pub fn adjacency(&self) -> &SymMatrix {
        &self.adjacency
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adjacency.get(i, j) != 0.0
    }

    pub(crate) fn set_edge(&mut self, i: usize, j: usize, weight: f64) {
        debug_assert!(i != j);
        self.adjacency.set(i, j, weight);
    }

    /// Edges as `(i, j)` with `i < j`, in row-major order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    pub fn non_edges(&self) -> Vec<(usize, usize)> {
        let n = self.n_nodes();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| !self.has_edge(i, j))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn degree(&self, i: usize) -> usize {
        (0..self.n_nodes()).filter(|&j| self.has_edge(i, j)).count()
    }

    /// Number of unordered pairs that are an edge in exactly one of the two graphs.
    pub fn support_difference(&self, other: &Graph) -> usize {
        assert_eq!(self.n_nodes(), other.n_nodes());
        let n = self.n_nodes();
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j) != other.has_edge(i, j))
            .count()
    }

    /// Same support with every weight set to 1.
    pub fn binarized(&self) -> Graph {
        let m = self
            .adjacency
            .as_matrix()
            .map(|v| if v != 0.0 { 1.0 } else { 0.0 });
        Graph {
            adjacency: SymMatrix::new(m).expect("square"),
        }
    }
}

/// A graph together with the positive definite precision matrix built on it.
#[derive(Clone, Debug)]
pub struct PrecisionGraph {
    pub graph: Graph,
    pub precision: SymMatrix,
}

impl PrecisionGraph {
    /// Checks positive definiteness and that the off-diagonal support matches the graph.
    pub fn new(graph: Graph, precision: SymMatrix) -> Result<Self> {
        let n = graph.n_nodes();
        if precision.dim() != n {
            return Err(Error::invalid("precision and graph dimensions differ"));
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if graph.has_edge(i, j) != (precision.get(i, j) != 0.0) {
                    return Err(Error::invalid(format!(
                        "precision support differs from the graph at ({i}, {j})"
                    )));
                }
            }
        }
        if precision.min_eigenvalue()? <= 0.0 {
            return Err(Error::numerical(
                "precision matrix is not positive definite",
            ));
        }
        Ok(PrecisionGraph { graph, precision })
    }

    pub fn n_nodes(&self) -> usize {
        self.graph.n_nodes()
    }

    pub fn covariance(&self) -> Result<SymMatrix> {
        self.precision.inverse_pd()
    }
}

/// `K` precision graphs over a shared node set and a shared hidden-node partition.
#[derive(Clone, Debug)]
pub struct MultiLayerFamily {
    pub layers: Vec<PrecisionGraph>,
    pub partition: BlockPartition,
    /// Pairwise support differences (edge counts), pairs in lexicographic order.
    pub support_differences: Vec<usize>,
}

impl MultiLayerFamily {
    pub fn new(layers: Vec<PrecisionGraph>, partition: BlockPartition) -> Result<Self> {
        let first = layers
            .first()
            .ok_or_else(|| Error::invalid("family needs at least one layer"))?;
        let n = first.n_nodes();
        if layers.iter().any(|l| l.n_nodes() != n) {
            return Err(Error::invalid("layers must share the node set"));
        }
        if partition.n_nodes() != n {
            return Err(Error::invalid("partition does not match the node count"));
        }
        let mut support_differences = Vec::new();
        for a in 0..layers.len() {
            for b in (a + 1)..layers.len() {
                support_differences.push(layers[a].graph.support_difference(&layers[b].graph));
            }
        }
        Ok(MultiLayerFamily {
            layers,
            partition,
            support_differences,
        })
    }

    pub fn num_layers(&self) -> usize {
        self.layers.len()
    }

    /// Observed blocks `S_O^(k)` of the true precision matrices.
    pub fn observed_truth(&self) -> Result<Vec<SymMatrix>> {
        self.layers
            .iter()
            .map(|l| block_view(&l.precision, &self.partition).map(|b| b.observed))
            .collect()
    }
}
