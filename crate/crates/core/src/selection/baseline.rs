use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    best_candidate, betweenness_centrality, Direction, Evaluated, GainMode, Objective, SelectionResult,
    SelectionState, Stooge, StoogeResistance,
};
use crate::error::{Error, Result};
use crate::graph::{NodeId, OpinionInstance, UndirectedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BaselineStrategy {
    Random,
    MaxDegree,
    Centrality,
}

impl fmt::Display for BaselineStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaselineStrategy::Random => "random",
            BaselineStrategy::MaxDegree => "maxdegree",
            BaselineStrategy::Centrality => "centrality",
        })
    }
}

impl FromStr for BaselineStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "random" => Ok(BaselineStrategy::Random),
            "maxdegree" | "max-degree" | "degree" => Ok(BaselineStrategy::MaxDegree),
            "centrality" | "betweenness" => Ok(BaselineStrategy::Centrality),
            _ => Err(Error::InvalidParameter(format!("unknown baseline {s:?}"))),
        }
    }
}

/// The `k` stooge nodes a baseline picks on `g`. Ranked strategies break ties
/// by lower node index.
pub fn stooge_set(g: &UndirectedGraph, k: usize, strategy: BaselineStrategy, seed: u64) -> Result<Vec<NodeId>> {
    let n = g.node_count();
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds node count {n}")));
    }
    let mut nodes: Vec<NodeId> = (0..n).collect();
    match strategy {
        BaselineStrategy::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            return Ok(rand::seq::index::sample(&mut rng, n, k).into_vec());
        }
        BaselineStrategy::MaxDegree => {
            nodes.sort_by(|&a, &b| g.degree(b).cmp(&g.degree(a)).then(a.cmp(&b)));
        }
        BaselineStrategy::Centrality => {
            let score = betweenness_centrality(g);
            nodes.sort_by(|&a, &b| score[b].total_cmp(&score[a]).then(a.cmp(&b)));
        }
    }
    nodes.truncate(k);
    Ok(nodes)
}

/// Baseline selection: the strategy fixes the stooge set on the support graph
/// of `W`, then resistances are assigned greedily, one stooge per round, each
/// time committing the `(stooge, resistance)` pair with the largest gain.
/// Stops early when no remaining pair improves the objective.
#[allow(clippy::too_many_arguments)]
pub fn baseline_select(
    inst: &OpinionInstance,
    k: usize,
    strategy: BaselineStrategy,
    objective: Objective,
    direction: Direction,
    seed: u64,
    mode: &GainMode,
    min_gain: f64,
) -> Result<SelectionResult> {
    let g = inst.influence().support_graph();
    let mut remaining = stooge_set(&g, k, strategy, seed)?;
    remaining.sort_unstable();
    let mut state = SelectionState::new(inst, objective, direction, mode)?;

    while !remaining.is_empty() {
        let pairs: Vec<Stooge> = remaining
            .iter()
            .flat_map(|&v| StoogeResistance::PREFERENCE.map(|r| Stooge::new(v, r)))
            .collect();
        let gains = state.gains_of(&pairs, mode)?;
        let evaluated = pairs.iter().zip(gains).map(|(&stooge, gain)| Evaluated { stooge, gain });
        let Some(best) = best_candidate(evaluated, min_gain) else {
            break;
        };
        let eq = state.equilibrium_of(best.stooge, mode)?;
        state.commit(best.stooge, best.gain, eq)?;
        remaining.retain(|&v| v != best.stooge.node);
    }
    Ok(state.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::gen_star;

    #[test]
    fn max_degree_on_star_is_center() {
        let g = gen_star(6).unwrap();
        assert_eq!(stooge_set(&g, 1, BaselineStrategy::MaxDegree, 0).unwrap(), vec![0]);
        assert_eq!(stooge_set(&g, 3, BaselineStrategy::MaxDegree, 0).unwrap(), vec![0, 1, 2]);
    }

    #[test]
    fn centrality_on_path_is_middle() {
        let g = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(stooge_set(&g, 1, BaselineStrategy::Centrality, 0).unwrap(), vec![1]);
    }

    #[test]
    fn random_is_seeded() {
        let g = gen_star(30).unwrap();
        let a = stooge_set(&g, 5, BaselineStrategy::Random, 7).unwrap();
        assert_eq!(a, stooge_set(&g, 5, BaselineStrategy::Random, 7).unwrap());
        assert_eq!(a.iter().collect::<std::collections::BTreeSet<_>>().len(), 5);
        assert!(stooge_set(&g, 32, BaselineStrategy::Random, 7).is_err());
    }
}
