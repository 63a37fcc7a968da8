//! Node embeddings from truncated random walks and skip-gram with negative
//! sampling. With the default `p = q = 1` the walks are uniform (DeepWalk);
//! other values give node2vec's second-order biased walks.
//!
//! Embeddings are trained once per graph and then frozen.

mod io;
mod sgns;
mod walks;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

pub use io::{load_embeddings, save_embeddings};
pub use sgns::train_sgns;
pub use walks::generate_walks;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WalkConfig {
    pub walks_per_node: usize,
    pub walk_length: usize,
    pub window: usize,
    pub negatives: usize,
    pub dims: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub rng_seed: u64,
    /// Return parameter.
    pub p: f64,
    /// In-out parameter.
    pub q: f64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        WalkConfig {
            walks_per_node: 10,
            walk_length: 80,
            window: 5,
            negatives: 5,
            dims: 64,
            epochs: 3,
            learning_rate: 0.025,
            rng_seed: 0,
            p: 1.0,
            q: 1.0,
        }
    }
}

impl WalkConfig {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("walks_per_node", self.walks_per_node),
            ("walk_length", self.walk_length),
            ("window", self.window),
            ("negatives", self.negatives),
            ("dims", self.dims),
        ];
        if let Some((name, _)) = counts.iter().find(|(_, v)| *v == 0) {
            return Err(Error::Config(format!("{name} must be at least 1")));
        }
        if self.window >= self.walk_length {
            return Err(Error::Config(format!(
                "window ({}) must be smaller than walk_length ({})",
                self.window, self.walk_length
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("learning_rate must be positive".into()));
        }
        if !(self.p > 0.0 && self.q > 0.0) {
            return Err(Error::Config("p and q must be positive".into()));
        }
        Ok(())
    }

    fn is_uniform(&self) -> bool {
        self.p == 1.0 && self.q == 1.0
    }
}

/// One real vector of fixed dimension per node.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingTable {
    dims: usize,
    data: Vec<f64>,
    trained_on: Option<String>,
}

impl EmbeddingTable {
    pub fn new(dims: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidArgument(
                "embedding dimension must be positive".into(),
            ));
        }
        let mut data = Vec::with_capacity(dims * vectors.len());
        for (v, vec) in vectors.iter().enumerate() {
            if vec.len() != dims {
                return Err(Error::InvalidArgument(format!(
                    "vector for node {v} has {} entries, expected {dims}",
                    vec.len()
                )));
            }
            if vec.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "vector for node {v} is not finite"
                )));
            }
            data.extend_from_slice(vec);
        }
        Ok(EmbeddingTable {
            dims,
            data,
            trained_on: None,
        })
    }

    pub(crate) fn from_flat(dims: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len() % dims, 0);
        EmbeddingTable {
            dims,
            data,
            trained_on: None,
        }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn node_count(&self) -> usize {
        self.data.len() / self.dims
    }

    pub fn vector(&self, v: NodeId) -> Result<&[f64]> {
        if v >= self.node_count() {
            return Err(Error::MissingEmbedding(v));
        }
        Ok(&self.data[v * self.dims..(v + 1) * self.dims])
    }

    /// Fingerprint of the graph these vectors were trained on, when known.
    pub fn trained_on(&self) -> Option<&str> {
        self.trained_on.as_deref()
    }

    pub fn with_trained_on(mut self, fingerprint: impl Into<String>) -> Self {
        self.trained_on = Some(fingerprint.into());
        self
    }

    /// Checks that every node of `g` has a vector.
    pub fn covers(&self, g: &Graph) -> Result<()> {
        if self.node_count() < g.node_count() {
            return Err(Error::MissingEmbedding(self.node_count()));
        }
        Ok(())
    }

    /// Hex digest of the vectors.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.dims as u64).to_le_bytes());
        for x in &self.data {
            h.update(x.to_bits().to_le_bytes());
        }
        h.finalize()[..16]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn euclidean_distance(&self, u: NodeId, v: NodeId) -> Result<f64> {
        let (a, b) = (self.vector(u)?, self.vector(v)?);
        Ok(a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt())
    }

    pub fn cosine_similarity(&self, u: NodeId, v: NodeId) -> Result<f64> {
        let (a, b) = (self.vector(u)?, self.vector(v)?);
        let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
        let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
        if na == 0.0 || nb == 0.0 {
            return Ok(0.0);
        }
        Ok(dot / (na * nb))
    }
}

/// Walks plus skip-gram training, tagged with the graph fingerprint.
pub fn train(g: &Graph, cfg: &WalkConfig) -> Result<EmbeddingTable> {
    let corpus = generate_walks(g, cfg)?;
    Ok(train_sgns(g.node_count(), &corpus, cfg)?.with_trained_on(g.fingerprint()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_basics() {
        let t =
            EmbeddingTable::new(2, vec![vec![0.0, 0.0], vec![3.0, 4.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(t.euclidean_distance(0, 0).unwrap(), 0.0);
        assert_eq!(t.euclidean_distance(0, 1).unwrap(), 5.0);
        assert_eq!(
            t.euclidean_distance(1, 2).unwrap(),
            t.euclidean_distance(2, 1).unwrap()
        );
        assert!(matches!(
            t.euclidean_distance(0, 3),
            Err(Error::MissingEmbedding(3))
        ));
    }

    #[test]
    fn rejects_ragged_or_non_finite() {
        assert!(EmbeddingTable::new(2, vec![vec![0.0]]).is_err());
        assert!(EmbeddingTable::new(1, vec![vec![f64::NAN]]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(WalkConfig::default().validate().is_ok());
        let bad = WalkConfig {
            window: 80,
            ..WalkConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = WalkConfig {
            dims: 0,
            ..WalkConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
