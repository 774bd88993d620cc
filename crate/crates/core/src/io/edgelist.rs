use crate::error::{Error, Result};
use crate::graph::Graph;

/// Plain-text edge list: a first line holding the node count, then one `i j [weight]`
/// line per undirected edge with 1-based indices. `#` starts a comment.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeListFile {
    pub n_nodes: usize,
    /// 1-based `(i, j, weight)`.
    pub edges: Vec<(usize, usize, f64)>,
}

impl EdgeListFile {
    pub fn to_graph(&self) -> Result<Graph> {
        let zero_based: Vec<_> = self
            .edges
            .iter()
            .map(|&(i, j, w)| (i - 1, j - 1, w))
            .collect();
        Graph::from_edges(self.n_nodes, &zero_based)
    }

    pub fn from_graph(g: &Graph) -> Self {
        EdgeListFile {
            n_nodes: g.n_nodes(),
            edges: g
                .edges()
                .into_iter()
                .map(|(i, j)| (i + 1, j + 1, g.adjacency().get(i, j)))
                .collect(),
        }
    }
}

pub fn parse_edge_list(text: &str) -> Result<EdgeListFile> {
    let mut n_nodes = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        let Some(n) = n_nodes else {
            let n: usize = fields[0].parse().map_err(|_| {
                Error::parse(line_no, 1, format!("invalid node count '{}'", fields[0]))
            })?;
            if n == 0 || fields.len() != 1 {
                return Err(Error::parse(
                    line_no,
                    1,
                    "first line must hold a positive node count",
                ));
            }
            n_nodes = Some(n);
            continue;
        };
        if fields.len() < 2 || fields.len() > 3 {
            return Err(Error::parse(line_no, 1, "expected 'i j [weight]'"));
        }
        let mut ends = [0usize; 2];
        for (slot, f) in ends.iter_mut().zip(&fields[..2]) {
            let v: usize = f
                .parse()
                .map_err(|_| Error::parse(line_no, 1, format!("invalid index '{f}'")))?;
            if v == 0 || v > n {
                return Err(Error::parse(
                    line_no,
                    1,
                    format!("index {v} outside 1..={n}"),
                ));
            }
            *slot = v;
        }
        let weight = match fields.get(2) {
            Some(f) => f
                .parse::<f64>()
                .ok()
                .filter(|w| w.is_finite() && *w > 0.0)
                .ok_or_else(|| Error::parse(line_no, 1, format!("invalid weight '{f}'")))?,
            None => 1.0,
        };
        let (i, j) = (ends[0], ends[1]);
        if i == j {
            return Err(Error::parse(line_no, 1, format!("self-loop on node {i}")));
        }
        if !seen.insert((i.min(j), i.max(j))) {
            return Err(Error::parse(
                line_no,
                1,
                format!("duplicate edge ({i}, {j})"),
            ));
        }
        edges.push((i, j, weight));
    }
    let n_nodes = n_nodes.ok_or_else(|| Error::parse(1, 1, "empty edge list"))?;
    Ok(EdgeListFile { n_nodes, edges })
}

pub fn write_edge_list(file: &EdgeListFile) -> String {
    let mut out = format!("{}\n", file.n_nodes);
    for &(i, j, w) in &file.edges {
        out.push_str(&format!("{i} {j} {w}\n"));
    }
    out
}
