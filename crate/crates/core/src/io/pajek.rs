//! Reader for the subset of the Pajek `.net` format used by multi-relational social
//! network data: `*Vertices`, `*Edges` and `*Arcs` sections (optionally tagged with a
//! relation number, `*Arcs :2 "label"`), `%` comments, quoted vertex labels and
//! optional edge weights.

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Graphs are stored densely, so larger networks are refused at parse time.
pub const MAX_VERTICES: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct PajekEdge {
    /// 1-based endpoints as written in the file.
    pub from: usize,
    pub to: usize,
    pub weight: f64,
    pub directed: bool,
    pub relation: Option<u32>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PajekNetwork {
    pub n_vertices: usize,
    /// Label per vertex (0-based), when the file provides one.
    pub labels: Vec<Option<String>>,
    pub edges: Vec<PajekEdge>,
}

impl PajekNetwork {
    /// Undirected graph over all relations. Arcs are symmetrized; parallel entries for
    /// the same pair keep the largest weight; self-loops are dropped.
    pub fn to_graph(&self, binarize: bool) -> Result<Graph> {
        self.graph_filtered(binarize, |_| true)
    }

    /// Relation numbers present in the file, in ascending order.
    pub fn relations(&self) -> Vec<u32> {
        let mut r: Vec<u32> = self.edges.iter().filter_map(|e| e.relation).collect();
        r.sort_unstable();
        r.dedup();
        r
    }

    /// Undirected graph for one relation of a multi-relational file.
    pub fn relation_graph(&self, relation: u32, binarize: bool) -> Result<Graph> {
        self.graph_filtered(binarize, |e| e.relation == Some(relation))
    }

    fn graph_filtered(&self, binarize: bool, keep: impl Fn(&PajekEdge) -> bool) -> Result<Graph> {
        let n = self.n_vertices;
        if n == 0 {
            return Err(Error::invalid("network has no vertices"));
        }
        let mut weights = vec![0.0f64; n * n];
        for e in self.edges.iter().filter(|e| keep(e)) {
            let (i, j) = (e.from - 1, e.to - 1);
            if i == j {
                continue;
            }
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            let w = if binarize { 1.0 } else { e.weight.abs() };
            if w > weights[a * n + b] {
                weights[a * n + b] = w;
            }
        }
        let mut list = Vec::new();
        for a in 0..n {
            for b in (a + 1)..n {
                if weights[a * n + b] > 0.0 {
                    list.push((a, b, weights[a * n + b]));
                }
            }
        }
        Graph::from_edges(n, &list)
    }
}

/// A token with its 1-based starting column.
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str, line_no: usize) -> Result<Vec<Token<'_>>> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c == b'"' {
            i += 1;
            while i < bytes.len() && bytes[i] != b'"' {
                i += 1;
            }
            if i == bytes.len() {
                return Err(Error::parse(
                    line_no,
                    start + 1,
                    "unterminated quoted label",
                ));
            }
            out.push(Token {
                text: &line[start + 1..i],
                column: start + 1,
            });
            i += 1;
        } else {
            while i < bytes.len() && !bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            out.push(Token {
                text: &line[start..i],
                column: start + 1,
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Copy)]
enum Section {
    Preamble,
    Vertices,
    Links {
        directed: bool,
        relation: Option<u32>,
    },
}

fn parse_index(tok: &Token, line: usize, n: usize) -> Result<usize> {
    let v: usize = tok.text.parse().map_err(|_| {
        Error::parse(
            line,
            tok.column,
            format!("expected a vertex index, found '{}'", tok.text),
        )
    })?;
    if v == 0 || v > n {
        return Err(Error::parse(
            line,
            tok.column,
            format!("vertex index {v} outside 1..={n}"),
        ));
    }
    Ok(v)
}

pub fn parse_pajek(text: &str) -> Result<PajekNetwork> {
    let mut n: Option<usize> = None;
    let mut labels = Vec::new();
    let mut edges = Vec::new();
    let mut section = Section::Preamble;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        let trimmed = line.trim_start();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let tokens = tokenize(line, line_no)?;
        let head = &tokens[0];
        if let Some(keyword) = head.text.strip_prefix('*') {
            let keyword = keyword.to_ascii_lowercase();
            section = match keyword.as_str() {
                "network" => Section::Preamble,
                "vertices" => {
                    if n.is_some() {
                        return Err(Error::parse(line_no, head.column, "duplicate *Vertices section"));
                    }
                    let count = tokens.get(1).ok_or_else(|| {
                        Error::parse(line_no, head.column, "*Vertices needs a vertex count")
                    })?;
                    let v: usize = count.text.parse().map_err(|_| {
                        Error::parse(line_no, count.column, format!("invalid vertex count '{}'", count.text))
                    })?;
                    if tokens.len() > 2 {
                        return Err(Error::parse(
                            line_no,
                            tokens[2].column,
                            "two-mode networks are not supported",
                        ));
                    }
                    if v > MAX_VERTICES {
                        return Err(Error::parse(
                            line_no,
                            count.column,
                            format!("vertex count {v} exceeds the supported maximum of {MAX_VERTICES}"),
                        ));
                    }
                    n = Some(v);
                    labels = vec![None; v];
                    Section::Vertices
                }
                "edges" | "arcs" => {
                    if n.is_none() {
                        return Err(Error::parse(line_no, head.column, "*Vertices must come first"));
                    }
                    let relation = match tokens.get(1) {
                        Some(t) if t.text.starts_with(':') => Some(t.text[1..].parse::<u32>().map_err(|_| {
                            Error::parse(line_no, t.column, format!("invalid relation tag '{}'", t.text))
                        })?),
                        _ => None,
                    };
                    Section::Links {
                        directed: keyword == "arcs",
                        relation,
                    }
                }
                other => {
                    return Err(Error::parse(
                        line_no,
                        head.column,
                        format!("unsupported section '*{other}' (only *Vertices, *Edges and *Arcs are read)"),
                    ))
                }
            };
            continue;
        }
        match section {
            Section::Preamble => {
                return Err(Error::parse(
                    line_no,
                    head.column,
                    "data line before any section header",
                ));
            }
            Section::Vertices => {
                let count = n.expect("vertices section implies a count");
                let v = parse_index(head, line_no, count)?;
                labels[v - 1] = tokens.get(1).map(|t| t.text.to_string());
            }
            Section::Links { directed, relation } => {
                let count = n.expect("links section implies a count");
                if tokens.len() < 2 {
                    return Err(Error::parse(
                        line_no,
                        head.column,
                        "edge line needs two endpoints",
                    ));
                }
                let from = parse_index(&tokens[0], line_no, count)?;
                let to = parse_index(&tokens[1], line_no, count)?;
                let weight = match tokens.get(2) {
                    None => 1.0,
                    Some(t) => {
                        let w: f64 = t.text.parse().map_err(|_| {
                            Error::parse(
                                line_no,
                                t.column,
                                format!("non-numeric weight '{}'", t.text),
                            )
                        })?;
                        if !w.is_finite() {
                            return Err(Error::parse(line_no, t.column, "weight must be finite"));
                        }
                        w
                    }
                };
                edges.push(PajekEdge {
                    from,
                    to,
                    weight,
                    directed,
                    relation,
                });
            }
        }
    }
    let n_vertices = n.ok_or_else(|| Error::parse(1, 1, "missing *Vertices header"))?;
    Ok(PajekNetwork {
        n_vertices,
        labels,
        edges,
    })
}
