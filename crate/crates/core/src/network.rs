//! Undirected weighted networks with dense node ids.
//!
//! Nodes are indexed `0..n` and carry a string label (country code or plain
//! index). Edges are unordered pairs with strictly positive weights; a pair
//! that does not trade has no edge. Networks are immutable once built, so
//! they can be shared freely across threads.

use std::collections::HashMap;

use thiserror::Error;

/// Dense node index, contiguous within one network.
pub type NodeId = usize;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(NodeId, NodeId),
    #[error("non-positive weight {weight} on edge ({i}, {j})")]
    NonPositiveWeight { i: NodeId, j: NodeId, weight: f64 },
    #[error("node index {index} out of range, network has {n_nodes} nodes")]
    NodeOutOfRange { index: NodeId, n_nodes: usize },
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),
    #[error("{got} labels supplied for {expected} nodes")]
    LabelCountMismatch { got: usize, expected: usize },
    #[error("operation needs at least 2 nodes, network has {0}")]
    TooFewNodes(usize),
    #[error("operation needs at least one edge")]
    EmptyNetwork,
}

/// Simple undirected graph with positive link weights.
///
/// Stores both a canonical edge list (pair `(i, j)` with `i < j`) and
/// per-node adjacency, so neighbor iteration is `O(deg)` and pair lookup is
/// `O(1)` amortized. Weights are `f64`; no rounding is applied.
#[derive(Debug, Clone)]
pub struct WeightedNetwork {
    labels: Vec<String>,
    label_index: HashMap<String, NodeId>,
    adjacency: Vec<Vec<(NodeId, f64)>>,
    edges: Vec<(NodeId, NodeId, f64)>,
    pair_index: HashMap<(NodeId, NodeId), usize>,
}

impl WeightedNetwork {
    /// Build from an edge list; node labels default to the decimal index.
    pub fn build(n_nodes: usize, edges: &[(NodeId, NodeId, f64)]) -> Result<Self, NetworkError> {
        let labels = (0..n_nodes).map(|i| i.to_string()).collect();
        Self::with_labels(labels, edges)
    }

    /// Build with explicit node labels; labels must be unique.
    pub fn with_labels(
        labels: Vec<String>,
        edges: &[(NodeId, NodeId, f64)],
    ) -> Result<Self, NetworkError> {
        let n_nodes = labels.len();
        let mut label_index = HashMap::with_capacity(n_nodes);
        for (id, label) in labels.iter().enumerate() {
            if label_index.insert(label.clone(), id).is_some() {
                return Err(NetworkError::DuplicateLabel(label.clone()));
            }
        }

        let mut adjacency = vec![Vec::new(); n_nodes];
        let mut pair_index = HashMap::with_capacity(edges.len());
        let mut canonical = Vec::with_capacity(edges.len());

        for &(i, j, w) in edges {
            if i >= n_nodes {
                return Err(NetworkError::NodeOutOfRange { index: i, n_nodes });
            }
            if j >= n_nodes {
                return Err(NetworkError::NodeOutOfRange { index: j, n_nodes });
            }
            if i == j {
                return Err(NetworkError::SelfLoop(i));
            }
            if !(w > 0.0) || !w.is_finite() {
                return Err(NetworkError::NonPositiveWeight { i, j, weight: w });
            }
            let key = (i.min(j), i.max(j));
            if pair_index.insert(key, canonical.len()).is_some() {
                return Err(NetworkError::DuplicateEdge(key.0, key.1));
            }
            canonical.push((key.0, key.1, w));
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
        }

        Ok(Self {
            labels,
            label_index,
            adjacency,
            edges: canonical,
            pair_index,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.labels.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Canonical edge list, each unordered pair once with `i < j`.
    pub fn edges(&self) -> &[(NodeId, NodeId, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, i: NodeId) -> &[(NodeId, f64)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: NodeId) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: NodeId, j: NodeId) -> bool {
        self.pair_index.contains_key(&(i.min(j), i.max(j)))
    }

    /// Weight of the link between `i` and `j`, or `None` if they are not linked.
    pub fn weight(&self, i: NodeId, j: NodeId) -> Option<f64> {
        self.pair_index
            .get(&(i.min(j), i.max(j)))
            .map(|&e| self.edges[e].2)
    }

    pub fn label(&self, i: NodeId) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_id(&self, label: &str) -> Option<NodeId> {
        self.label_index.get(label).copied()
    }

    /// Node strengths: `s_i = sum of incident link weights`. Isolated nodes get 0.
    pub fn strengths(&self) -> Vec<f64> {
        let mut s = vec![0.0; self.n_nodes()];
        for &(i, j, w) in &self.edges {
            s[i] += w;
            s[j] += w;
        }
        s
    }

    /// Incident edge count per node.
    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    /// Realized fraction of linked pairs, `L / [N(N-1)/2]`.
    pub fn link_density(&self) -> Result<f64, NetworkError> {
        let n = self.n_nodes();
        if n < 2 {
            return Err(NetworkError::TooFewNodes(n));
        }
        let pairs = (n * (n - 1) / 2) as f64;
        Ok(self.n_edges() as f64 / pairs)
    }

    /// Arithmetic mean of the edge weights.
    pub fn mean_link_weight(&self) -> Result<f64, NetworkError> {
        if self.edges.is_empty() {
            return Err(NetworkError::EmptyNetwork);
        }
        Ok(self.total_weight() / self.n_edges() as f64)
    }

    /// Sum of all edge weights (each unordered pair counted once).
    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|&(_, _, w)| w).sum()
    }
}
