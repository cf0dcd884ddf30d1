//! Graphs, influence matrices and opinion instances.
//!
//! An [`InfluenceMatrix`] `W` is column stochastic: column `v` lists the nodes
//! that influence `v` together with their weights `w_uv`. Both the column view
//! (who influences `v`) and the row view (whom `u` influences) are stored, since
//! the update rule reads columns and activation propagation reads rows.

mod fixtures;
mod generators;
mod opinions;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fixtures::{gen_fixture, Fixture, FixtureSpec};
pub use generators::{
    gen_communities, gen_gnp, gen_grid, gen_random_tree, gen_star, prufer_decode, CommunitiesConfig,
};
pub use opinions::{sample_opinions, OpinionDistribution};

pub type NodeId = usize;

/// Tolerance on column sums of an influence matrix.
pub const COLUMN_SUM_TOLERANCE: f64 = 1e-12;

/// Simple undirected graph with sorted adjacency lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl UndirectedGraph {
    /// Graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("graph needs at least one node".into()));
        }
        Ok(Self {
            adj: vec![Vec::new(); n],
            edge_count: 0,
        })
    }

    /// Builds a graph from an edge iterator. Duplicate edges collapse; self-loops
    /// and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        let mut g = Self::empty(n)?;
        for (u, v) in edges {
            g.insert_edge(u, v)?;
        }
        Ok(g)
    }

    /// Inserts `{u, v}`; returns false if it was already present.
    pub(crate) fn insert_edge(&mut self, u: NodeId, v: NodeId) -> Result<bool> {
        let n = self.node_count();
        for node in [u, v] {
            if node >= n {
                return Err(Error::NodeOutOfRange { node, n });
            }
        }
        if u == v {
            return Err(Error::InvalidParameter(format!("self-loop at node {u}")));
        }
        match self.adj[u].binary_search(&v) {
            Ok(_) => Ok(false),
            Err(pos) => {
                self.adj[u].insert(pos, v);
                let pos = self.adj[v].binary_search(&u).unwrap_err();
                self.adj[v].insert(pos, u);
                self.edge_count += 1;
                Ok(true)
            }
        }
    }

    /// Appends an edge known to be new, keeping lists sorted only if the caller
    /// emits edges in lexicographic order.
    pub(crate) fn push_edge_sorted(&mut self, u: NodeId, v: NodeId) {
        debug_assert!(u < v);
        self.adj[u].push(v);
        self.adj[v].push(u);
        self.edge_count += 1;
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: NodeId, v: NodeId) -> bool {
        u < self.node_count() && self.adj[u].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(u, nbrs)| nbrs.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }
}

/// Sparse column-stochastic influence matrix. `w_uv` is how much `u`
/// influences `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    /// `columns[v]` = sorted `(u, w_uv)` with `w_uv > 0`.
    columns: Vec<Vec<(NodeId, f64)>>,
    /// `rows[u]` = sorted `(v, w_uv)` with `w_uv > 0`.
    rows: Vec<Vec<(NodeId, f64)>>,
}

impl InfluenceMatrix {
    /// Builds `W` from per-column influencer lists. Zero weights are dropped;
    /// duplicate influencers within a column are an error.
    pub fn from_columns(columns: Vec<Vec<(NodeId, f64)>>) -> Result<Self> {
        let n = columns.len();
        if n == 0 {
            return Err(Error::InvalidParameter("influence matrix needs at least one node".into()));
        }
        let mut rows = vec![Vec::new(); n];
        let mut cleaned = Vec::with_capacity(n);
        for (v, mut col) in columns.into_iter().enumerate() {
            col.retain(|&(_, w)| w != 0.0);
            col.sort_by_key(|&(u, _)| u);
            let mut sum = 0.0;
            for (i, &(u, w)) in col.iter().enumerate() {
                if u >= n {
                    return Err(Error::NodeOutOfRange { node: u, n });
                }
                if !(w.is_finite() && w > 0.0) {
                    return Err(Error::InvalidParameter(format!("weight w[{u},{v}] = {w} is not a nonnegative number")));
                }
                if i > 0 && col[i - 1].0 == u {
                    return Err(Error::InvalidParameter(format!("duplicate entry w[{u},{v}]")));
                }
                sum += w;
                rows[u].push((v, w));
            }
            if (sum - 1.0).abs() > COLUMN_SUM_TOLERANCE {
                return Err(Error::NotColumnStochastic { column: v, sum });
            }
            cleaned.push(col);
        }
        Ok(Self {
            columns: cleaned,
            rows,
        })
    }

    /// Builds `W` from `(u, v, w_uv)` triplets.
    pub fn from_entries<I>(n: usize, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, f64)>,
    {
        let mut columns = vec![Vec::new(); n];
        for (u, v, w) in entries {
            if v >= n {
                return Err(Error::NodeOutOfRange { node: v, n });
            }
            columns[v].push((u, w));
        }
        Self::from_columns(columns)
    }

    /// Uniform neighbor influence `w_uv = 1/deg(v)`. Isolated nodes get a unit
    /// self-loop.
    pub fn from_undirected(g: &UndirectedGraph) -> Self {
        let columns = (0..g.node_count())
            .map(|v| {
                let nbrs = g.neighbors(v);
                if nbrs.is_empty() {
                    vec![(v, 1.0)]
                } else {
                    let w = 1.0 / nbrs.len() as f64;
                    nbrs.iter().map(|&u| (u, w)).collect()
                }
            })
            .collect();
        Self::from_columns(columns).expect("uniform neighbor weights are column stochastic")
    }

    pub fn node_count(&self) -> usize {
        self.columns.len()
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Nodes influencing `v`, with weights `w_uv`.
    pub fn influencers(&self, v: NodeId) -> &[(NodeId, f64)] {
        &self.columns[v]
    }

    /// Nodes influenced by `u`, with weights `w_uv`.
    pub fn influencees(&self, u: NodeId) -> &[(NodeId, f64)] {
        &self.rows[u]
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> f64 {
        match self.columns[v].binary_search_by_key(&u, |&(x, _)| x) {
            Ok(i) => self.columns[v][i].1,
            Err(_) => 0.0,
        }
    }

    /// All nonzero entries as `(u, v, w_uv)`, column by column.
    pub fn entries(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.columns
            .iter()
            .enumerate()
            .flat_map(|(v, col)| col.iter().map(move |&(u, w)| (u, v, w)))
    }

    /// `sum_u w_uv x_u` for a single node.
    #[inline]
    pub fn weighted_input(&self, v: NodeId, x: &[f64]) -> f64 {
        self.columns[v].iter().map(|&(u, w)| w * x[u]).sum()
    }

    /// Undirected graph on the nonzero pattern of `W`, self-loops dropped.
    pub fn support_graph(&self) -> UndirectedGraph {
        let n = self.node_count();
        let pairs: BTreeSet<(NodeId, NodeId)> = self
            .entries()
            .filter(|&(u, v, _)| u != v)
            .map(|(u, v, _)| (u.min(v), u.max(v)))
            .collect();
        let mut g = UndirectedGraph::empty(n).expect("n >= 1");
        for (u, v) in pairs {
            g.push_edge_sorted(u, v);
        }
        g
    }
}

/// The triple `(W, alpha, s)`: influence structure, resistances and innate
/// opinions. `W` is shared, so cloning an instance copies only the vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct OpinionInstance {
    influence: Arc<InfluenceMatrix>,
    resistance: Vec<f64>,
    innate: Vec<f64>,
}

impl OpinionInstance {
    pub fn new(influence: impl Into<Arc<InfluenceMatrix>>, resistance: Vec<f64>, innate: Vec<f64>) -> Result<Self> {
        let influence = influence.into();
        let n = influence.node_count();
        if resistance.len() != n {
            return Err(Error::DimensionMismatch {
                what: "resistance vector",
                expected: n,
                actual: resistance.len(),
            });
        }
        if innate.len() != n {
            return Err(Error::DimensionMismatch {
                what: "innate opinion vector",
                expected: n,
                actual: innate.len(),
            });
        }
        if let Some((v, a)) = resistance.iter().enumerate().find(|(_, a)| !(0.0..=1.0).contains(*a)) {
            return Err(Error::InvalidParameter(format!("resistance of node {v} is {a}, outside [0, 1]")));
        }
        if let Some((v, s)) = innate.iter().enumerate().find(|(_, s)| !s.is_finite()) {
            return Err(Error::InvalidParameter(format!("innate opinion of node {v} is {s}")));
        }
        Ok(Self {
            influence,
            resistance,
            innate,
        })
    }

    /// Instance over an undirected graph with a constant resistance.
    pub fn uniform(g: &UndirectedGraph, resistance: f64, innate: Vec<f64>) -> Result<Self> {
        let n = g.node_count();
        Self::new(InfluenceMatrix::from_undirected(g), vec![resistance; n], innate)
    }

    pub fn node_count(&self) -> usize {
        self.influence.node_count()
    }

    pub fn influence(&self) -> &InfluenceMatrix {
        &self.influence
    }

    pub fn shared_influence(&self) -> Arc<InfluenceMatrix> {
        Arc::clone(&self.influence)
    }

    pub fn resistance(&self) -> &[f64] {
        &self.resistance
    }

    pub fn innate(&self) -> &[f64] {
        &self.innate
    }

    pub fn set_resistance(&mut self, v: NodeId, alpha: f64) -> Result<()> {
        let n = self.node_count();
        if v >= n {
            return Err(Error::NodeOutOfRange { node: v, n });
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!("resistance {alpha} outside [0, 1]")));
        }
        self.resistance[v] = alpha;
        Ok(())
    }
}

/// Serializable form of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceData {
    pub n: usize,
    pub resistance: Vec<f64>,
    pub innate: Vec<f64>,
    /// `(u, v, w_uv)` triplets.
    pub influence: Vec<(NodeId, NodeId, f64)>,
}

impl From<&OpinionInstance> for InstanceData {
    fn from(inst: &OpinionInstance) -> Self {
        Self {
            n: inst.node_count(),
            resistance: inst.resistance.clone(),
            innate: inst.innate.clone(),
            influence: inst.influence.entries().collect(),
        }
    }
}

impl TryFrom<InstanceData> for OpinionInstance {
    type Error = Error;

    fn try_from(data: InstanceData) -> Result<Self> {
        let w = InfluenceMatrix::from_entries(data.n, data.influence)?;
        OpinionInstance::new(w, data.resistance, data.innate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn column_sums(w: &InfluenceMatrix) -> Vec<f64> {
        (0..w.node_count())
            .map(|v| w.influencers(v).iter().map(|&(_, x)| x).sum())
            .collect()
    }

    #[test]
    fn path_influence_is_mutual_and_full() {
        let g = UndirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        let w = InfluenceMatrix::from_undirected(&g);
        assert_eq!(w.weight(0, 1), 1.0);
        assert_eq!(w.weight(1, 0), 1.0);
    }

    #[test]
    fn triangle_weights_are_halves() {
        let g = UndirectedGraph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let w = InfluenceMatrix::from_undirected(&g);
        for u in 0..3 {
            for v in 0..3 {
                let expected = if u == v { 0.0 } else { 0.5 };
                assert_eq!(w.weight(u, v), expected);
            }
        }
    }

    #[test]
    fn star_columns() {
        let g = gen_star(3).unwrap();
        let w = InfluenceMatrix::from_undirected(&g);
        let center: Vec<f64> = w.influencers(0).iter().map(|&(_, x)| x).collect();
        assert_eq!(center, vec![1.0 / 3.0; 3]);
        for leaf in 1..=3 {
            assert_eq!(w.influencers(leaf), &[(0, 1.0)]);
        }
        for s in column_sums(&w) {
            assert!((s - 1.0).abs() <= COLUMN_SUM_TOLERANCE);
        }
    }

    #[test]
    fn isolated_vertex_gets_self_loop() {
        let g = UndirectedGraph::from_edges(3, [(0, 1)]).unwrap();
        let w = InfluenceMatrix::from_undirected(&g);
        assert_eq!(w.influencers(2), &[(2, 1.0)]);
        assert_eq!(w.support_graph(), g);
    }

    #[test]
    fn rejects_non_stochastic_columns() {
        let err = InfluenceMatrix::from_columns(vec![vec![(1, 0.5)], vec![(0, 1.0)]]).unwrap_err();
        assert!(matches!(err, Error::NotColumnStochastic { column: 0, .. }));
        let err = InfluenceMatrix::from_columns(vec![vec![(1, 1.5), (0, -0.5)], vec![(0, 1.0)]]).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter(_)));
    }

    #[test]
    fn graph_rejects_self_loops_and_dedups() {
        assert!(UndirectedGraph::from_edges(2, [(0, 0)]).is_err());
        assert!(UndirectedGraph::from_edges(2, [(0, 2)]).is_err());
        let g = UndirectedGraph::from_edges(2, [(0, 1), (1, 0), (0, 1)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn instance_validates_dimensions_and_range() {
        let g = UndirectedGraph::from_edges(2, [(0, 1)]).unwrap();
        assert!(OpinionInstance::uniform(&g, 0.5, vec![0.0]).is_err());
        assert!(OpinionInstance::uniform(&g, 1.5, vec![0.0, 1.0]).is_err());
        let inst = OpinionInstance::uniform(&g, 0.5, vec![0.0, 1.0]).unwrap();
        let back = OpinionInstance::try_from(InstanceData::from(&inst)).unwrap();
        assert_eq!(back, inst);
    }
}
