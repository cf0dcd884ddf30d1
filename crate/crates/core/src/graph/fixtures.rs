//! Hand-built instances on which the objectives show neither diminishing nor
//! increasing returns.

use serde::{Deserialize, Serialize};

use super::{InfluenceMatrix, NodeId, OpinionInstance, UndirectedGraph};
use crate::error::{Error, Result};

/// Resistance given to clique nodes of the lollipop.
const LOLLIPOP_CLIQUE_RESISTANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FixtureSpec {
    /// Clique `K_l` (fully resistant, opinion 0) next to an empty graph on `l`
    /// nodes (no resistance, opinion 0) that listens equally to two mutually
    /// influencing nodes `v` (opinion 1) and `w` (opinion -1), both with
    /// resistance `1 - beta`.
    NonSubmodular { size: usize, beta: f64 },
    /// Clique `K_clique` attached to a path `P_path`. Two path nodes carry
    /// innate opinion 1, everything else 0.
    Lollipop { clique: usize, path: usize },
}

/// A fixture instance plus its two distinguished nodes.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub instance: OpinionInstance,
    /// NonSubmodular: `[v, w]`. Lollipop: `[path node next to the clique,
    /// interior path node]`.
    pub marked: [NodeId; 2],
    /// Underlying undirected graph when the influence is symmetric.
    pub graph: Option<UndirectedGraph>,
}

pub fn gen_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    match *spec {
        FixtureSpec::NonSubmodular { size, beta } => non_submodular(size, beta),
        FixtureSpec::Lollipop { clique, path } => lollipop(clique, path),
    }
}

// Layout: 0 = v, 1 = w, 2..2+l = clique, 2+l..2+2l = empty graph.
fn non_submodular(size: usize, beta: f64) -> Result<Fixture> {
    if size < 1 {
        return Err(Error::InvalidParameter("fixture size must be at least 1".into()));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(Error::InvalidParameter(format!("beta = {beta} must lie in (0, 1)")));
    }
    let (v, w) = (0, 1);
    let clique = 2..2 + size;
    let empty = 2 + size..2 + 2 * size;
    let n = 2 + 2 * size;

    let mut columns: Vec<Vec<(NodeId, f64)>> = vec![Vec::new(); n];
    columns[v] = vec![(w, 1.0)];
    columns[w] = vec![(v, 1.0)];
    for c in clique.clone() {
        columns[c] = if size == 1 {
            vec![(c, 1.0)]
        } else {
            let weight = 1.0 / (size - 1) as f64;
            clique.clone().filter(|&u| u != c).map(|u| (u, weight)).collect()
        };
    }
    for u in empty.clone() {
        columns[u] = vec![(v, 0.5), (w, 0.5)];
    }

    let mut resistance = vec![0.0; n];
    let mut innate = vec![0.0; n];
    resistance[v] = 1.0 - beta;
    resistance[w] = 1.0 - beta;
    innate[v] = 1.0;
    innate[w] = -1.0;
    for c in clique {
        resistance[c] = 1.0;
    }
    let instance = OpinionInstance::new(InfluenceMatrix::from_columns(columns)?, resistance, innate)?;
    Ok(Fixture {
        instance,
        marked: [v, w],
        graph: None,
    })
}

// Layout: 0..clique = clique, clique..clique+path = path. Clique node
// `clique - 1` touches the first path node.
fn lollipop(clique: usize, path: usize) -> Result<Fixture> {
    if clique < 3 || path < 3 {
        return Err(Error::InvalidParameter(format!(
            "lollipop needs clique >= 3 and path >= 3, got {clique} and {path}"
        )));
    }
    let n = clique + path;
    let mut edges = Vec::new();
    for u in 0..clique {
        for v in u + 1..clique {
            edges.push((u, v));
        }
    }
    edges.push((clique - 1, clique));
    for p in clique..n - 1 {
        edges.push((p, p + 1));
    }
    let graph = UndirectedGraph::from_edges(n, edges)?;

    let attached = clique;
    let interior = clique + path / 2;
    let mut resistance = vec![0.0; n];
    let mut innate = vec![0.0; n];
    resistance[..clique].fill(LOLLIPOP_CLIQUE_RESISTANCE);
    innate[attached] = 1.0;
    innate[interior] = 1.0;
    let instance = OpinionInstance::new(InfluenceMatrix::from_undirected(&graph), resistance, innate)?;
    Ok(Fixture {
        instance,
        marked: [attached, interior],
        graph: Some(graph),
    })
}
