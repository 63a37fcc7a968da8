//! Graph serialization.
//!
//! The JSON form is versioned and has a fixed field order:
//!
//! ```text
//! { "format": "imict-graph", "version": 1, "directed": bool, "node_count": n,
//!   "original_ids": [..n], "prob_model": {..}, "cost_model": {..},
//!   "arcs": [[source, target, probability], ..], "costs": [..n] }
//! ```
//!
//! Arcs are listed in `(source, target)` order using dense ids.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CostModel, Graph, NodeId, ProbabilityModel};
use crate::error::{Error, Result};

const FORMAT: &str = "imict-graph";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct GraphFile {
    format: String,
    version: u32,
    directed: bool,
    node_count: usize,
    original_ids: Vec<u64>,
    prob_model: ProbabilityModel,
    cost_model: CostModel,
    arcs: Vec<(NodeId, NodeId, f64)>,
    costs: Vec<f64>,
}

pub fn write_json(g: &Graph, path: impl AsRef<Path>) -> Result<()> {
    let file = GraphFile {
        format: FORMAT.to_string(),
        version: VERSION,
        directed: g.is_directed(),
        node_count: g.node_count(),
        original_ids: g.original_ids().to_vec(),
        prob_model: g.prob_model().clone(),
        cost_model: g.cost_model().clone(),
        arcs: g.arcs().map(|a| (a.source, a.target, a.prob)).collect(),
        costs: g.costs().to_vec(),
    };
    let path = path.as_ref();
    let text = serde_json::to_string(&file)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: GraphFile = serde_json::from_str(&text)?;
    if file.format != FORMAT || file.version != VERSION {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: format!("unsupported graph format {} v{}", file.format, file.version),
        });
    }
    if file.original_ids.len() != file.node_count {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: 1,
            message: "original_ids length differs from node_count".into(),
        });
    }
    Ok(Graph::from_arcs(file.node_count, file.arcs, file.costs)?
        .with_original_ids(file.original_ids)
        .with_flags(file.directed, file.prob_model, file.cost_model))
}

/// Writes the graph as a plain edge list using original ids. Undirected graphs
/// emit each edge once.
pub fn write_edge_list(g: &Graph, mut out: impl Write) -> std::io::Result<()> {
    writeln!(
        out,
        "# nodes: {} arcs: {} directed: {}",
        g.node_count(),
        g.arc_count(),
        g.is_directed()
    )?;
    for a in g.arcs() {
        if g.is_directed() || a.source < a.target {
            writeln!(
                out,
                "{} {}",
                g.original_id(a.source),
                g.original_id(a.target)
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{load_edge_list, powerlaw_cluster};
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn json_round_trip(n in 2usize..20, arcs in prop::collection::vec((0usize..20, 0usize..20, 0.0f64..=1.0), 0..60)) {
            let arcs: Vec<_> = arcs.into_iter().map(|(u, v, p)| (u % n, v % n, p)).collect();
            let costs: Vec<f64> = (0..n).map(|i| i as f64 * 0.5).collect();
            let g = Graph::from_arcs(n, arcs, costs).unwrap();
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("g.json");
            write_json(&g, &path).unwrap();
            prop_assert_eq!(read_json(&path).unwrap(), g);
        }
    }

    #[test]
    fn edge_list_round_trip() {
        let g = powerlaw_cluster(
            50,
            2,
            0.5,
            1,
            ProbabilityModel::WeightedCascade,
            CostModel::Degree,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g.txt");
        write_edge_list(&g, fs::File::create(&path).unwrap()).unwrap();
        let (h, _) = load_edge_list(
            &path,
            false,
            ProbabilityModel::WeightedCascade,
            CostModel::Degree,
        )
        .unwrap();
        let edges = |g: &Graph| {
            let mut e: Vec<_> = g
                .arcs()
                .map(|a| (g.original_id(a.source), g.original_id(a.target), a.prob))
                .collect();
            e.sort_by(|x, y| x.partial_cmp(y).unwrap());
            e
        };
        assert_eq!(edges(&g), edges(&h));
    }
}
