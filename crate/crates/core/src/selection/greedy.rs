use std::collections::BTreeSet;

use super::{best_candidate, Direction, Evaluated, GainMode, Objective, SelectionResult, SelectionState, Stooge, StoogeResistance};
use crate::error::{Error, Result};
use crate::graph::{NodeId, OpinionInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct GreedyConfig {
    /// Lazy slack: a scan stops once the last recomputed gain exceeds `phi`
    /// times the next cached gain. `f64::INFINITY` disables pruning.
    pub phi: f64,
    pub gain_mode: GainMode,
    pub min_gain: f64,
    /// Restrict stooge candidates to these nodes.
    pub candidates: Option<BTreeSet<NodeId>>,
}

impl GreedyConfig {
    pub fn new(epsilon: f64, phi: f64) -> Self {
        Self {
            phi,
            gain_mode: GainMode::incremental(epsilon),
            min_gain: super::DEFAULT_MIN_GAIN,
            candidates: None,
        }
    }
}

impl Default for GreedyConfig {
    fn default() -> Self {
        Self::new(1e-5, 1.1)
    }
}

struct Candidate {
    stooge: Stooge,
    cached: f64,
}

/// Approximate lazy greedy.
///
/// Every `(node, resistance)` pair keeps a cached marginal gain, initially
/// `+inf`. A round visits the pairs of unselected nodes in decreasing cached
/// order and recomputes each gain from the current equilibrium, stopping as
/// soon as the previously recomputed gain exceeds `phi` times the cached gain
/// of the next pair. The best recomputed pair is committed if it improves the
/// objective by more than `min_gain`; otherwise selection stops early.
pub fn greedy_lazy(
    inst: &OpinionInstance,
    k: usize,
    objective: Objective,
    direction: Direction,
    config: &GreedyConfig,
) -> Result<SelectionResult> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(config.phi >= 1.0) {
        return Err(Error::InvalidParameter(format!("slack phi = {} must be at least 1", config.phi)));
    }
    if let GainMode::Incremental(opts) = &config.gain_mode {
        if !(opts.tolerance > 0.0) {
            return Err(Error::InvalidParameter(format!("epsilon = {} must be positive", opts.tolerance)));
        }
    }
    let n = inst.node_count();
    let nodes: Vec<NodeId> = match &config.candidates {
        Some(set) => {
            if let Some(&node) = set.iter().find(|&&v| v >= n) {
                return Err(Error::NodeOutOfRange { node, n });
            }
            set.iter().copied().collect()
        }
        None => (0..n).collect(),
    };
    let mut pool: Vec<Candidate> = nodes
        .iter()
        .flat_map(|&v| StoogeResistance::PREFERENCE.map(|r| Candidate { stooge: Stooge::new(v, r), cached: f64::INFINITY }))
        .collect();

    let mode = &config.gain_mode;
    let mut state = SelectionState::new(inst, objective, direction, mode)?;

    for _ in 0..k {
        pool.sort_by(|a, b| b.cached.total_cmp(&a.cached).then(a.stooge.tie_key().cmp(&b.stooge.tie_key())));

        // Pairs with an infinite cached gain can never trigger the break, so
        // the leading run of them is evaluated as one parallel batch.
        let fresh = pool.iter().take_while(|c| c.cached == f64::INFINITY).count();
        let batch: Vec<Stooge> = pool[..fresh].iter().map(|c| c.stooge).collect();
        let fresh_gains = state.gains_of(&batch, mode)?;
        let mut evaluated: Vec<Evaluated> = Vec::with_capacity(fresh);
        for (c, &gain) in pool[..fresh].iter_mut().zip(&fresh_gains) {
            c.cached = gain;
            evaluated.push(Evaluated { stooge: c.stooge, gain });
        }
        let mut prev = fresh_gains.last().copied().unwrap_or(0.0);

        // Equilibria of sequentially scanned winners are kept; a winner from
        // the parallel batch is recomputed once.
        let mut best = best_candidate(evaluated, config.min_gain);
        let mut best_eq = None;
        for c in pool[fresh..].iter_mut() {
            if config.phi.is_finite() && prev > config.phi * c.cached {
                break;
            }
            let (gain, eq) = match state.try_stooge(c.stooge, mode)? {
                Some((gain, eq)) => (gain, Some(eq)),
                None => (f64::NEG_INFINITY, None),
            };
            state.evaluations += 1;
            c.cached = gain;
            prev = gain;
            let challenger = Evaluated { stooge: c.stooge, gain };
            let incumbent = best.take();
            best = best_candidate(incumbent.into_iter().chain(std::iter::once(challenger)), config.min_gain);
            if best.as_ref().is_some_and(|b| b.stooge == c.stooge) {
                best_eq = eq;
            }
        }

        let Some(best) = best else {
            break;
        };
        let eq = match best_eq {
            Some(eq) => eq,
            None => state.equilibrium_of(best.stooge, mode)?,
        };
        state.commit(best.stooge, best.gain, eq)?;
        pool.retain(|c| c.stooge.node != best.stooge.node);
    }
    Ok(state.finish())
}
