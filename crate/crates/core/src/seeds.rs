use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// A non-empty, sorted, duplicate-free set of seed nodes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<NodeId>", into = "Vec<NodeId>")]
pub struct SeedSet(Vec<NodeId>);

impl SeedSet {
    /// Sorts and deduplicates `nodes`; fails when nothing is left.
    pub fn new(mut nodes: Vec<NodeId>) -> Result<Self> {
        nodes.sort_unstable();
        nodes.dedup();
        if nodes.is_empty() {
            return Err(Error::EmptySeedSet);
        }
        Ok(SeedSet(nodes))
    }

    pub fn singleton(v: NodeId) -> Self {
        SeedSet(vec![v])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for API symmetry with collections.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.0
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().copied()
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        match self.0.last() {
            Some(&v) => g.check_node(v),
            None => Err(Error::EmptySeedSet),
        }
    }

    /// Checks every member is below `n`.
    pub fn check_range(&self, n: usize) -> Result<()> {
        match self.0.last() {
            Some(&v) if v >= n => Err(Error::NodeOutOfRange {
                node: v,
                node_count: n,
            }),
            _ => Ok(()),
        }
    }

    pub(crate) fn from_sorted_unchecked(nodes: Vec<NodeId>) -> Self {
        debug_assert!(!nodes.is_empty() && nodes.windows(2).all(|w| w[0] < w[1]));
        SeedSet(nodes)
    }

    pub fn into_vec(self) -> Vec<NodeId> {
        self.0
    }
}

impl TryFrom<Vec<NodeId>> for SeedSet {
    type Error = Error;

    fn try_from(v: Vec<NodeId>) -> Result<Self> {
        SeedSet::new(v)
    }
}

impl From<SeedSet> for Vec<NodeId> {
    fn from(s: SeedSet) -> Self {
        s.0
    }
}

impl fmt::Display for SeedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|v| v.to_string()).collect();
        write!(f, "{{{}}}", parts.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sorts_dedups_and_rejects_empty() {
        assert_eq!(SeedSet::new(vec![3, 1, 3, 2]).unwrap().nodes(), &[1, 2, 3]);
        assert!(matches!(SeedSet::new(vec![]), Err(Error::EmptySeedSet)));
        assert!(serde_json::from_str::<SeedSet>("[]").is_err());
        assert_eq!(
            serde_json::from_str::<SeedSet>("[2,0]").unwrap().nodes(),
            &[0, 2]
        );
    }
}
