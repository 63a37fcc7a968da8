//! Directed social networks annotated with propagation probabilities and
//! per-node activation costs.
//!
//! Arcs are stored in compressed sparse row form for both directions. The
//! position of an arc in the outgoing CSR arrays is its stable *arc index*,
//! which the diffusion module uses to key per-arc randomness.

mod fixtures;
mod io;
mod load;
mod sample;

use std::collections::HashMap;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

pub use fixtures::{powerlaw_cluster, supermarket, SUPERMARKET_LABELS};
pub use io::{read_json, write_edge_list, write_json};
pub use load::{load_edge_list, read_cost_file, LoadReport};
pub use sample::induced_subgraph;

pub type NodeId = usize;

/// How propagation probabilities are assigned to arcs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProbabilityModel {
    /// Every arc gets the same probability.
    Constant { p: f64 },
    /// `p_uv = 1 / in-degree(v)`.
    #[default]
    WeightedCascade,
    /// Probabilities were supplied explicitly with each arc.
    Explicit,
}

/// How activation costs are assigned to nodes.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CostModel {
    /// Total degree; undirected inputs count each neighbour once.
    #[default]
    Degree,
    /// Every node costs 1.
    Unit,
    /// Costs read from a `node_id cost` file, keyed by original node id.
    File { path: PathBuf },
    /// Costs were supplied explicitly.
    Explicit,
}

/// One directed arc with its propagation probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Arc {
    pub source: NodeId,
    pub target: NodeId,
    pub prob: f64,
    /// Position in the outgoing CSR arrays.
    pub index: usize,
}

/// An immutable directed graph `G = (V, E, C)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    directed: bool,
    out_offsets: Vec<usize>,
    out_targets: Vec<NodeId>,
    out_probs: Vec<f64>,
    in_offsets: Vec<usize>,
    in_sources: Vec<NodeId>,
    costs: Vec<f64>,
    original_ids: Vec<u64>,
    prob_model: ProbabilityModel,
    cost_model: CostModel,
}

impl Graph {
    /// Builds a graph from explicit arcs. Self-loops are dropped and duplicate
    /// arcs collapse onto their first occurrence.
    pub fn from_arcs(
        node_count: usize,
        arcs: impl IntoIterator<Item = (NodeId, NodeId, f64)>,
        costs: Vec<f64>,
    ) -> Result<Self> {
        let arcs: Vec<_> = arcs.into_iter().collect();
        for &(u, v, p) in &arcs {
            check_id(u, node_count)?;
            check_id(v, node_count)?;
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "probability {p} on arc {u}->{v} is outside [0, 1]"
                )));
            }
        }
        check_costs(&costs, node_count)?;
        let (out_offsets, out_targets, out_probs) = build_csr(node_count, arcs);
        let mut g = Graph {
            directed: true,
            out_offsets,
            out_targets,
            out_probs,
            in_offsets: Vec::new(),
            in_sources: Vec::new(),
            costs,
            original_ids: (0..node_count as u64).collect(),
            prob_model: ProbabilityModel::Explicit,
            cost_model: CostModel::Explicit,
        };
        g.build_in_adjacency();
        Ok(g)
    }

    /// Builds a graph from plain node pairs, assigning probabilities and costs
    /// from the given models. Undirected inputs produce both arcs.
    ///
    /// `file_costs` supplies per-node costs when `cost_model` is `File`.
    pub(crate) fn from_pairs(
        node_count: usize,
        pairs: &[(NodeId, NodeId)],
        directed: bool,
        prob_model: ProbabilityModel,
        cost_model: CostModel,
        file_costs: Option<Vec<f64>>,
        original_ids: Vec<u64>,
    ) -> Result<Self> {
        debug_assert_eq!(original_ids.len(), node_count);
        let mut arcs = Vec::with_capacity(pairs.len() * if directed { 1 } else { 2 });
        for &(u, v) in pairs {
            check_id(u, node_count)?;
            check_id(v, node_count)?;
            arcs.push((u, v, 0.0));
            if !directed {
                arcs.push((v, u, 0.0));
            }
        }
        let (out_offsets, out_targets, out_probs) = build_csr(node_count, arcs);
        let mut g = Graph {
            directed,
            out_offsets,
            out_targets,
            out_probs,
            in_offsets: Vec::new(),
            in_sources: Vec::new(),
            costs: vec![0.0; node_count],
            original_ids,
            prob_model,
            cost_model,
        };
        g.build_in_adjacency();
        g.assign_probabilities()?;
        g.assign_costs(file_costs)?;
        Ok(g)
    }

    fn build_in_adjacency(&mut self) {
        let n = self.node_count();
        let mut counts = vec![0usize; n + 1];
        for &v in &self.out_targets {
            counts[v + 1] += 1;
        }
        for i in 0..n {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut sources = vec![0; self.out_targets.len()];
        for u in 0..n {
            for &v in &self.out_targets[self.out_offsets[u]..self.out_offsets[u + 1]] {
                sources[fill[v]] = u;
                fill[v] += 1;
            }
        }
        self.in_offsets = counts;
        self.in_sources = sources;
    }

    fn assign_probabilities(&mut self) -> Result<()> {
        match self.prob_model {
            ProbabilityModel::Constant { p } => {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidArgument(format!(
                        "constant probability {p} is outside [0, 1]"
                    )));
                }
                self.out_probs.iter_mut().for_each(|x| *x = p);
            }
            ProbabilityModel::WeightedCascade => {
                for i in 0..self.out_targets.len() {
                    let v = self.out_targets[i];
                    self.out_probs[i] = 1.0 / self.in_degree(v) as f64;
                }
            }
            ProbabilityModel::Explicit => {}
        }
        Ok(())
    }

    fn assign_costs(&mut self, file_costs: Option<Vec<f64>>) -> Result<()> {
        let n = self.node_count();
        self.costs = match &self.cost_model {
            CostModel::Unit => vec![1.0; n],
            CostModel::Degree => (0..n)
                .map(|v| {
                    if self.directed {
                        (self.in_degree(v) + self.out_degree(v)) as f64
                    } else {
                        self.out_degree(v) as f64
                    }
                })
                .collect(),
            CostModel::File { path } => file_costs.ok_or_else(|| {
                Error::Config(format!("cost file {} was not loaded", path.display()))
            })?,
            CostModel::Explicit => file_costs.unwrap_or_else(|| std::mem::take(&mut self.costs)),
        };
        check_costs(&self.costs, n)
    }

    pub fn node_count(&self) -> usize {
        self.out_offsets.len() - 1
    }

    /// Number of directed arcs (an undirected edge counts twice).
    pub fn arc_count(&self) -> usize {
        self.out_targets.len()
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub fn prob_model(&self) -> &ProbabilityModel {
        &self.prob_model
    }

    pub fn cost_model(&self) -> &CostModel {
        &self.cost_model
    }

    #[inline]
    pub fn out_degree(&self, v: NodeId) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    #[inline]
    pub fn in_degree(&self, v: NodeId) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    /// `(in-degree, out-degree)` of `v`.
    pub fn degree(&self, v: NodeId) -> Result<(usize, usize)> {
        check_id(v, self.node_count())?;
        Ok((self.in_degree(v), self.out_degree(v)))
    }

    /// Out-neighbours of `v`, sorted ascending.
    #[inline]
    pub fn out_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Probabilities parallel to [`Graph::out_neighbors`].
    #[inline]
    pub fn out_probs(&self, v: NodeId) -> &[f64] {
        &self.out_probs[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    /// Arc index of the first out-arc of `v`.
    #[inline]
    pub fn out_arc_offset(&self, v: NodeId) -> usize {
        self.out_offsets[v]
    }

    /// In-neighbours of `v`, sorted ascending.
    #[inline]
    pub fn in_neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn has_arc(&self, u: NodeId, v: NodeId) -> bool {
        self.out_neighbors(u).binary_search(&v).is_ok()
    }

    /// All arcs in `(source, target)` order.
    pub fn arcs(&self) -> impl Iterator<Item = Arc> + '_ {
        (0..self.node_count()).flat_map(move |u| {
            let start = self.out_offsets[u];
            self.out_neighbors(u)
                .iter()
                .zip(self.out_probs(u))
                .enumerate()
                .map(move |(i, (&v, &p))| Arc {
                    source: u,
                    target: v,
                    prob: p,
                    index: start + i,
                })
        })
    }

    #[inline]
    pub fn cost(&self, v: NodeId) -> f64 {
        self.costs[v]
    }

    pub fn costs(&self) -> &[f64] {
        &self.costs
    }

    /// The id `v` had in the source file.
    pub fn original_id(&self, v: NodeId) -> u64 {
        self.original_ids[v]
    }

    pub fn original_ids(&self) -> &[u64] {
        &self.original_ids
    }

    /// Map from original ids back to dense ids.
    pub fn dense_ids(&self) -> HashMap<u64, NodeId> {
        self.original_ids
            .iter()
            .enumerate()
            .map(|(i, &o)| (o, i))
            .collect()
    }

    pub fn check_node(&self, v: NodeId) -> Result<()> {
        check_id(v, self.node_count())
    }

    /// Hex digest over structure, probabilities and costs.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.node_count() as u64).to_le_bytes());
        h.update([self.directed as u8]);
        for a in self.arcs() {
            h.update((a.source as u64).to_le_bytes());
            h.update((a.target as u64).to_le_bytes());
            h.update(a.prob.to_bits().to_le_bytes());
        }
        for c in &self.costs {
            h.update(c.to_bits().to_le_bytes());
        }
        for o in &self.original_ids {
            h.update(o.to_le_bytes());
        }
        let digest = h.finalize();
        digest[..16].iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Recomputes probabilities and costs from the stored models. `carried`
    /// supplies costs for the `File` and `Explicit` cost models.
    pub(crate) fn reassign(&mut self, carried: Option<Vec<f64>>) -> Result<()> {
        self.assign_probabilities()?;
        self.assign_costs(carried)
    }

    pub(crate) fn with_original_ids(mut self, ids: Vec<u64>) -> Self {
        debug_assert_eq!(ids.len(), self.node_count());
        self.original_ids = ids;
        self
    }

    pub(crate) fn with_flags(
        mut self,
        directed: bool,
        prob: ProbabilityModel,
        cost: CostModel,
    ) -> Self {
        self.directed = directed;
        self.prob_model = prob;
        self.cost_model = cost;
        self
    }
}

fn check_id(v: NodeId, node_count: usize) -> Result<()> {
    if v < node_count {
        Ok(())
    } else {
        Err(Error::NodeOutOfRange {
            node: v,
            node_count,
        })
    }
}

fn check_costs(costs: &[f64], node_count: usize) -> Result<()> {
    if costs.len() != node_count {
        return Err(Error::InvalidArgument(format!(
            "{} costs given for {node_count} nodes",
            costs.len()
        )));
    }
    if let Some((v, c)) = costs
        .iter()
        .enumerate()
        .find(|(_, c)| !c.is_finite() || **c < 0.0)
    {
        return Err(Error::InvalidArgument(format!(
            "node {v} has invalid cost {c}"
        )));
    }
    Ok(())
}

/// Sorts arcs by `(source, target)`, drops self-loops and keeps the first of
/// any duplicate.
fn build_csr(
    node_count: usize,
    arcs: Vec<(NodeId, NodeId, f64)>,
) -> (Vec<usize>, Vec<NodeId>, Vec<f64>) {
    let mut keyed: Vec<(NodeId, NodeId, usize, f64)> = arcs
        .into_iter()
        .enumerate()
        .filter(|(_, (u, v, _))| u != v)
        .map(|(i, (u, v, p))| (u, v, i, p))
        .collect();
    keyed.sort_unstable_by_key(|&(u, v, i, _)| (u, v, i));
    keyed.dedup_by_key(|&mut (u, v, _, _)| (u, v));

    let mut offsets = vec![0usize; node_count + 1];
    for &(u, ..) in &keyed {
        offsets[u + 1] += 1;
    }
    for i in 0..node_count {
        offsets[i + 1] += offsets[i];
    }
    let targets = keyed.iter().map(|&(_, v, ..)| v).collect();
    let probs = keyed.iter().map(|&(.., p)| p).collect();
    (offsets, targets, probs)
}
