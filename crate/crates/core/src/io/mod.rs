//! File formats: dense CSV matrices, 1-based edge lists and Pajek networks.

mod edgelist;
mod matrix_csv;
mod pajek;

pub use edgelist::{parse_edge_list, write_edge_list, EdgeListFile};
pub use matrix_csv::{format_matrix_csv, parse_matrix_csv, read_matrix_csv, write_matrix_csv};
pub use pajek::{parse_pajek, PajekEdge, PajekNetwork, MAX_VERTICES};

use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::Graph;

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads one graph from a `.net` (Pajek) or any other extension (edge list) file.
pub fn load_graph(path: &Path, binarize: bool) -> Result<Graph> {
    let text = read_text(path)?;
    let is_pajek = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("net") || e.eq_ignore_ascii_case("paj"));
    let g = if is_pajek {
        parse_pajek(&text)?.to_graph(binarize)?
    } else {
        parse_edge_list(&text)?.to_graph()?
    };
    Ok(if binarize { g.binarized() } else { g })
}

/// One graph per file, in the order given; all files must declare the same node count.
pub fn load_multilayer(paths: &[impl AsRef<Path>], binarize: bool) -> Result<Vec<Graph>> {
    if paths.is_empty() {
        return Err(Error::invalid("no layer files given"));
    }
    let graphs = paths
        .iter()
        .map(|p| load_graph(p.as_ref(), binarize))
        .collect::<Result<Vec<_>>>()?;
    let n = graphs[0].n_nodes();
    if let Some((i, g)) = graphs.iter().enumerate().find(|(_, g)| g.n_nodes() != n) {
        return Err(Error::invalid(format!(
            "layer {} has {} nodes but layer 0 has {n}",
            i,
            g.n_nodes()
        )));
    }
    Ok(graphs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn multilayer_from_mixed_files() {
        let dir = tempfile::tempdir().unwrap();
        let a = write(dir.path(), "a.net", "*Vertices 3\n*Edges\n1 2\n");
        let b = write(dir.path(), "b.txt", "3\n2 3 0.5\n");
        assert_eq!(load_multilayer(&[&a], false).unwrap().len(), 1);
        let layers = load_multilayer(&[&a, &b], false).unwrap();
        assert_eq!(layers.len(), 2);
        assert!(layers[1].has_edge(1, 2));
        let c = write(dir.path(), "c.net", "*Vertices 4\n*Edges\n1 2\n");
        assert!(matches!(
            load_multilayer(&[&a, &c], false),
            Err(Error::InvalidInput(_))
        ));
        let missing = dir.path().join("missing.net");
        assert!(matches!(
            load_multilayer(&[&missing], false),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn thirty_two_node_layers() {
        let dir = tempfile::tempdir().unwrap();
        let mut paths = Vec::new();
        for k in 0..4 {
            let mut text = String::from("*Vertices 32\n*Arcs\n");
            for i in 1..=32 {
                text.push_str(&format!("{} {}\n", i, (i + k) % 32 + 1));
            }
            paths.push(write(dir.path(), &format!("l{k}.net"), &text));
        }
        let layers = load_multilayer(&paths, true).unwrap();
        assert_eq!(layers.len(), 4);
        assert!(layers.iter().all(|g| g.n_nodes() == 32));
    }
}
