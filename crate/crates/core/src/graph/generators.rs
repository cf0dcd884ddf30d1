//! Synthetic graph generators. All randomized generators are deterministic
//! functions of their seed.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{NodeId, UndirectedGraph};
use crate::error::{Error, Result};

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

/// Erdős–Rényi `G(n, p)`.
pub fn gen_gnp(n: usize, p: f64, seed: u64) -> Result<UndirectedGraph> {
    check_probability(p)?;
    let mut g = UndirectedGraph::empty(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.push_edge_sorted(u, v);
            }
        }
    }
    Ok(g)
}

/// Block model with one big community and several small ones. Small
/// communities connect only to the big one.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunitiesConfig {
    pub big_size: usize,
    pub small_count: usize,
    pub small_size: usize,
    pub p_intra: f64,
    pub p_inter: f64,
}

impl Default for CommunitiesConfig {
    fn default() -> Self {
        Self {
            big_size: 200,
            small_count: 10,
            small_size: 10,
            p_intra: 0.5,
            p_inter: 0.3,
        }
    }
}

impl CommunitiesConfig {
    pub fn node_count(&self) -> usize {
        self.big_size + self.small_count * self.small_size
    }

    /// Community index of a node: 0 is the big community, `1..=small_count`
    /// the small ones. Nodes are laid out block by block.
    pub fn community_of(&self, v: NodeId) -> usize {
        if v < self.big_size {
            0
        } else {
            1 + (v - self.big_size) / self.small_size
        }
    }
}

pub fn gen_communities(config: &CommunitiesConfig, seed: u64) -> Result<UndirectedGraph> {
    check_probability(config.p_intra)?;
    check_probability(config.p_inter)?;
    if config.small_count > 0 && config.small_size == 0 {
        return Err(Error::InvalidParameter("small communities must be nonempty".into()));
    }
    let n = config.node_count();
    let mut g = UndirectedGraph::empty(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for u in 0..n {
        let cu = config.community_of(u);
        for v in u + 1..n {
            let cv = config.community_of(v);
            let p = if cu == cv {
                config.p_intra
            } else if cu == 0 || cv == 0 {
                config.p_inter
            } else {
                continue;
            };
            if rng.random_bool(p) {
                g.push_edge_sorted(u, v);
            }
        }
    }
    Ok(g)
}

/// Decodes a Prüfer sequence of length `n - 2` into its labeled tree.
pub fn prufer_decode(seq: &[NodeId], n: usize) -> Result<UndirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("a tree needs at least 2 nodes, got {n}")));
    }
    if seq.len() != n - 2 {
        return Err(Error::DimensionMismatch {
            what: "Prüfer sequence length",
            expected: n - 2,
            actual: seq.len(),
        });
    }
    let mut degree = vec![1usize; n];
    for &a in seq {
        if a >= n {
            return Err(Error::NodeOutOfRange { node: a, n });
        }
        degree[a] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<NodeId>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut g = UndirectedGraph::empty(n)?;
    for &a in seq {
        let Reverse(leaf) = leaves.pop().expect("a valid sequence always leaves a leaf");
        g.insert_edge(leaf, a)?;
        degree[leaf] -= 1;
        degree[a] -= 1;
        if degree[a] == 1 {
            leaves.push(Reverse(a));
        }
    }
    let Reverse(u) = leaves.pop().expect("two nodes remain");
    let Reverse(v) = leaves.pop().expect("two nodes remain");
    g.insert_edge(u, v)?;
    Ok(g)
}

/// Uniform random labeled tree via a uniform Prüfer sequence.
pub fn gen_random_tree(n: usize, seed: u64) -> Result<UndirectedGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("a tree needs at least 2 nodes, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let seq: Vec<NodeId> = (0..n - 2).map(|_| rng.random_range(0..n)).collect();
    prufer_decode(&seq, n)
}

/// Star with center 0 and leaves `1..=leaves`.
pub fn gen_star(leaves: usize) -> Result<UndirectedGraph> {
    if leaves == 0 {
        return Err(Error::InvalidParameter("star needs at least one leaf".into()));
    }
    let mut g = UndirectedGraph::empty(leaves + 1)?;
    for v in 1..=leaves {
        g.push_edge_sorted(0, v);
    }
    Ok(g)
}

/// 4-neighbor lattice; node `(r, c)` has index `r * cols + c`.
pub fn gen_grid(rows: usize, cols: usize) -> Result<UndirectedGraph> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("grid dimensions must be positive".into()));
    }
    let mut g = UndirectedGraph::empty(rows * cols)?;
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                g.insert_edge(v, v + 1)?;
            }
            if r + 1 < rows {
                g.insert_edge(v, v + cols)?;
            }
        }
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use std::collections::{BTreeSet, HashMap};

    use super::*;

    fn edge_set(g: &UndirectedGraph) -> BTreeSet<(NodeId, NodeId)> {
        g.edges().collect()
    }

    #[test]
    fn gnp_extremes() {
        assert_eq!(gen_gnp(5, 0.0, 3).unwrap().edge_count(), 0);
        assert_eq!(gen_gnp(5, 1.0, 3).unwrap().edge_count(), 10);
        assert!(gen_gnp(5, 1.5, 3).is_err());
    }

    #[test]
    fn gnp_edge_count_is_binomial() {
        let pairs = 1000.0 * 999.0 / 2.0;
        let mean = 0.05 * pairs;
        let sd = (pairs * 0.05 * 0.95f64).sqrt();
        let g = gen_gnp(1000, 0.05, 11).unwrap();
        assert!((g.edge_count() as f64 - mean).abs() <= 4.0 * sd, "{}", g.edge_count());
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(edge_set(&gen_gnp(60, 0.1, 5).unwrap()), edge_set(&gen_gnp(60, 0.1, 5).unwrap()));
        assert_ne!(edge_set(&gen_gnp(60, 0.1, 5).unwrap()), edge_set(&gen_gnp(60, 0.1, 6).unwrap()));
        let cfg = CommunitiesConfig::default();
        assert_eq!(gen_communities(&cfg, 2).unwrap(), gen_communities(&cfg, 2).unwrap());
        assert_eq!(gen_random_tree(40, 9).unwrap(), gen_random_tree(40, 9).unwrap());
    }

    #[test]
    fn communities_structure() {
        let cfg = CommunitiesConfig::default();
        let g = gen_communities(&cfg, 1).unwrap();
        assert_eq!(g.node_count(), 300);
        let mut big_internal = 0usize;
        for (u, v) in g.edges() {
            let (cu, cv) = (cfg.community_of(u), cfg.community_of(v));
            assert!(cu == cv || cu == 0 || cv == 0, "edge {u}-{v} joins two small communities");
            if cu == 0 && cv == 0 {
                big_internal += 1;
            }
        }
        let pairs = 200.0 * 199.0 / 2.0;
        let sd = (pairs * 0.25f64).sqrt();
        assert!((big_internal as f64 - 9950.0).abs() <= 4.0 * sd, "{big_internal}");
    }

    #[test]
    fn prufer_examples() {
        let g = prufer_decode(&[], 2).unwrap();
        assert_eq!(edge_set(&g), BTreeSet::from([(0, 1)]));
        let g = prufer_decode(&[3, 3, 3, 4], 6).unwrap();
        assert_eq!(edge_set(&g), BTreeSet::from([(0, 3), (1, 3), (2, 3), (3, 4), (4, 5)]));
        assert!(prufer_decode(&[0], 2).is_err());
        assert!(prufer_decode(&[7], 3).is_err());
    }

    #[test]
    fn prufer_is_bijective_on_four_nodes() {
        let mut trees = BTreeSet::new();
        for a in 0..4 {
            for b in 0..4 {
                let g = prufer_decode(&[a, b], 4).unwrap();
                assert_eq!(g.edge_count(), 3);
                assert!(g.is_connected());
                trees.insert(edge_set(&g).into_iter().collect::<Vec<_>>());
            }
        }
        assert_eq!(trees.len(), 16);
    }

    #[test]
    fn random_trees() {
        assert_eq!(edge_set(&gen_random_tree(2, 0).unwrap()), BTreeSet::from([(0, 1)]));
        let g = gen_random_tree(150, 4).unwrap();
        assert_eq!(g.edge_count(), 149);
        assert!(g.is_connected());

        let mut counts: HashMap<Vec<(NodeId, NodeId)>, usize> = HashMap::new();
        let draws = 10_000;
        for seed in 0..draws {
            let g = gen_random_tree(3, seed).unwrap();
            *counts.entry(g.edges().collect()).or_default() += 1;
        }
        assert_eq!(counts.len(), 3);
        for (tree, c) in counts {
            let freq = c as f64 / draws as f64;
            assert!((freq - 1.0 / 3.0).abs() <= 0.02, "{tree:?}: {freq}");
        }
    }

    #[test]
    fn star_and_grid_sizes() {
        let s = gen_star(150).unwrap();
        assert_eq!((s.node_count(), s.edge_count()), (151, 150));
        let g = gen_grid(10, 5).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (50, 85));
        let g = gen_grid(1, 1).unwrap();
        assert_eq!((g.node_count(), g.edge_count()), (1, 0));
    }
}
