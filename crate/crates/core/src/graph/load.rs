use std::collections::HashMap;
use std::fs;
use std::path::Path;

use log::warn;

use super::{CostModel, Graph, NodeId, ProbabilityModel};
use crate::error::{Error, Result};

/// What happened while reading an edge list.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LoadReport {
    pub lines_read: usize,
    pub self_loops_dropped: usize,
    pub duplicate_pairs: usize,
}

/// Reads a SNAP-style edge list: whitespace-separated `src dst` integer pairs,
/// `#` comment lines. Node ids are remapped densely in order of first
/// appearance.
pub fn load_edge_list(
    path: impl AsRef<Path>,
    directed: bool,
    prob_model: ProbabilityModel,
    cost_model: CostModel,
) -> Result<(Graph, LoadReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut report = LoadReport::default();
    let mut dense: HashMap<u64, NodeId> = HashMap::new();
    let mut original: Vec<u64> = Vec::new();
    let mut pairs = Vec::new();
    let mut intern = |id: u64| {
        *dense.entry(id).or_insert_with(|| {
            original.push(id);
            original.len() - 1
        })
    };

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        report.lines_read += 1;
        let mut fields = line.split_whitespace();
        let parse = |tok: Option<&str>| -> Result<u64> {
            let tok = tok.ok_or_else(|| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("expected two node ids, got {line:?}"),
            })?;
            tok.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("invalid node id {tok:?}"),
            })
        };
        let src = parse(fields.next())?;
        let dst = parse(fields.next())?;
        if let Some(extra) = fields.next() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: lineno + 1,
                message: format!("unexpected trailing field {extra:?}"),
            });
        }
        let (u, v) = (intern(src), intern(dst));
        if u == v {
            report.self_loops_dropped += 1;
            continue;
        }
        pairs.push((u, v));
    }
    if report.lines_read == 0 {
        return Err(Error::EmptyGraph(path.to_path_buf()));
    }
    if report.self_loops_dropped > 0 {
        warn!(
            "{}: dropped {} self-loop(s)",
            path.display(),
            report.self_loops_dropped
        );
    }

    let mut canonical: Vec<(NodeId, NodeId)> = pairs
        .iter()
        .map(|&(u, v)| if directed || u < v { (u, v) } else { (v, u) })
        .collect();
    canonical.sort_unstable();
    canonical.dedup();
    report.duplicate_pairs = pairs.len() - canonical.len();

    let file_costs = match &cost_model {
        CostModel::File { path: cost_path } => {
            let by_original = read_cost_file(cost_path)?;
            let costs = original
                .iter()
                .map(|id| {
                    by_original.get(id).copied().ok_or_else(|| {
                        Error::Config(format!(
                            "cost file {} has no entry for node {id}",
                            cost_path.display()
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Some(costs)
        }
        _ => None,
    };

    let n = original.len();
    let graph = Graph::from_pairs(
        n, &pairs, directed, prob_model, cost_model, file_costs, original,
    )?;
    Ok((graph, report))
}

/// Reads `node_id cost` lines keyed by original node id.
pub fn read_cost_file(path: impl AsRef<Path>) -> Result<HashMap<u64, f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut costs = HashMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(bad(format!("expected `node_id cost`, got {line:?}")));
        }
        let id: u64 = fields[0]
            .parse()
            .map_err(|_| bad(format!("invalid node id {:?}", fields[0])))?;
        let cost: f64 = fields[1]
            .parse()
            .map_err(|_| bad(format!("invalid cost {:?}", fields[1])))?;
        if !cost.is_finite() || cost < 0.0 {
            return Err(bad(format!(
                "cost must be finite and non-negative, got {cost}"
            )));
        }
        costs.insert(id, cost);
    }
    Ok(costs)
}
