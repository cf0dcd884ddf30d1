//! Stooge selection: lazy greedy, degree/centrality/random baselines and
//! exhaustive search.
//!
//! A stooge is a node whose resistance is overwritten with 0 (it becomes a
//! pure follower) or 1 (it is pinned to its innate opinion).

mod baseline;
mod brute;
mod centrality;
mod greedy;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{self, EquilibriumResult, IterativeOptions};
use crate::error::{Error, Result};
use crate::graph::{NodeId, OpinionInstance};
use crate::metrics;

pub use baseline::{baseline_select, stooge_set, BaselineStrategy};
pub use brute::{brute_force, brute_force_evaluations, DEFAULT_BRUTE_FORCE_BUDGET};
pub use centrality::betweenness_centrality;
pub use greedy::{greedy_lazy, GreedyConfig};

/// Gains at or below this are treated as no improvement; exact solves leave
/// noise of order 1e-11 in gains that are zero in exact arithmetic.
pub const DEFAULT_MIN_GAIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Mse,
    Polarization,
}

impl Objective {
    /// Objective value of an equilibrium, given the mean innate opinion.
    pub fn value(self, theta_hat: f64, x_star: &[f64]) -> f64 {
        match self {
            Objective::Mse => metrics::mse(x_star, theta_hat),
            Objective::Polarization => metrics::polarization(x_star),
        }
    }

    pub fn other(self) -> Self {
        match self {
            Objective::Mse => Objective::Polarization,
            Objective::Polarization => Objective::Mse,
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Objective::Mse => "mse",
            Objective::Polarization => "polarization",
        })
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mse" => Ok(Objective::Mse),
            "polarization" | "pol" => Ok(Objective::Polarization),
            _ => Err(Error::InvalidParameter(format!("unknown objective {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    #[serde(rename = "max", alias = "maximize")]
    Maximize,
    #[serde(rename = "min", alias = "minimize")]
    Minimize,
}

impl Direction {
    /// Maps an objective change to a gain, positive meaning improvement.
    pub fn gain(self, before: f64, after: f64) -> f64 {
        match self {
            Direction::Maximize => after - before,
            Direction::Minimize => before - after,
        }
    }

    /// True if `a` is at least as good as `b`, up to `slack`.
    pub fn at_least(self, a: f64, b: f64, slack: f64) -> bool {
        self.gain(b, a) >= -slack
    }

    /// Share of `direct` given up by reaching only `other`; positive when
    /// `other` is worse.
    pub fn relative_loss(self, direct: f64, other: f64) -> f64 {
        self.gain(other, direct) / direct.abs()
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Maximize => "max",
            Direction::Minimize => "min",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "max" | "maximize" => Ok(Direction::Maximize),
            "min" | "minimize" => Ok(Direction::Minimize),
            _ => Err(Error::InvalidParameter(format!("unknown direction {s:?}"))),
        }
    }
}

/// The two resistance values a stooge can be given.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum StoogeResistance {
    Zero,
    One,
}

impl StoogeResistance {
    /// Tie-break order: 1 before 0.
    pub const PREFERENCE: [StoogeResistance; 2] = [StoogeResistance::One, StoogeResistance::Zero];

    pub fn value(self) -> f64 {
        match self {
            StoogeResistance::Zero => 0.0,
            StoogeResistance::One => 1.0,
        }
    }

    fn rank(self) -> u8 {
        match self {
            StoogeResistance::One => 0,
            StoogeResistance::Zero => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Stooge {
    pub node: NodeId,
    pub resistance: StoogeResistance,
}

impl Stooge {
    pub fn new(node: NodeId, resistance: StoogeResistance) -> Self {
        Self { node, resistance }
    }

    /// Deterministic tie-break key: lower node first, then resistance 1.
    fn tie_key(&self) -> (NodeId, u8) {
        (self.node, self.resistance.rank())
    }
}

/// Ordered list of stooges with distinct nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct StoogeAssignment(Vec<Stooge>);

impl StoogeAssignment {
    pub fn new(stooges: Vec<Stooge>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for s in &stooges {
            if !seen.insert(s.node) {
                return Err(Error::DuplicateStooge(s.node));
            }
        }
        Ok(Self(stooges))
    }

    pub fn stooges(&self) -> &[Stooge] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn nodes(&self) -> BTreeSet<NodeId> {
        self.0.iter().map(|s| s.node).collect()
    }

    pub fn prefix(&self, len: usize) -> StoogeAssignment {
        Self(self.0[..len].to_vec())
    }

    fn push(&mut self, stooge: Stooge) {
        debug_assert!(self.0.iter().all(|s| s.node != stooge.node));
        self.0.push(stooge);
    }
}

/// `node:beta` pairs joined by semicolons, e.g. `17:1;42:0`.
impl fmt::Display for StoogeAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            let beta = match s.resistance {
                StoogeResistance::Zero => 0,
                StoogeResistance::One => 1,
            };
            write!(f, "{}:{}", s.node, beta)?;
        }
        Ok(())
    }
}

impl FromStr for StoogeAssignment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::default());
        }
        let stooges = s
            .split(';')
            .map(|pair| {
                let bad = || Error::InvalidParameter(format!("malformed stooge {pair:?}, expected node:beta"));
                let (node, beta) = pair.split_once(':').ok_or_else(bad)?;
                let node = node.trim().parse().map_err(|_| bad())?;
                let resistance = match beta.trim() {
                    "0" => StoogeResistance::Zero,
                    "1" => StoogeResistance::One,
                    _ => return Err(bad()),
                };
                Ok(Stooge { node, resistance })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(stooges)
    }
}

/// Copy of `inst` with each stooge's resistance overwritten.
pub fn apply_stooges(inst: &OpinionInstance, assignment: &StoogeAssignment) -> Result<OpinionInstance> {
    // Re-validate: the assignment may have been assembled by hand.
    let assignment = StoogeAssignment::new(assignment.0.clone())?;
    let mut out = inst.clone();
    for s in assignment.stooges() {
        out.set_resistance(s.node, s.resistance.value())?;
    }
    Ok(out)
}

/// How candidate equilibria are recomputed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GainMode {
    /// Warm-started active-set iteration seeded with the changed node.
    Incremental(IterativeOptions),
    /// Full exact solve for every candidate.
    Exact,
}

impl GainMode {
    pub fn incremental(epsilon: f64) -> Self {
        GainMode::Incremental(IterativeOptions::new(epsilon))
    }

    pub(crate) fn initial(&self, inst: &OpinionInstance) -> Result<EquilibriumResult> {
        match self {
            GainMode::Incremental(opts) => require_converged(dynamics::iterate_from_innate(inst, opts)?),
            GainMode::Exact => dynamics::solve(inst),
        }
    }

    /// Equilibrium after `changed` had its resistance modified in `inst`,
    /// given the equilibrium `x` before the change.
    pub(crate) fn after_change(&self, inst: &OpinionInstance, changed: NodeId, x: &[f64]) -> Result<EquilibriumResult> {
        match self {
            GainMode::Incremental(opts) => require_converged(dynamics::iterate(inst, &[changed], x.to_vec(), opts)?),
            GainMode::Exact => dynamics::solve(inst),
        }
    }
}

fn require_converged(r: EquilibriumResult) -> Result<EquilibriumResult> {
    if r.converged {
        Ok(r)
    } else {
        Err(Error::NotConverged {
            iterations: r.iterations,
            residual: r.residual,
        })
    }
}

#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub assignment: StoogeAssignment,
    /// Objective value before any stooge.
    pub initial_objective: f64,
    /// Objective value after each committed stooge.
    pub objective_trace: Vec<f64>,
    /// Improvement contributed by each committed stooge, in the optimization
    /// direction (positive is better).
    pub gains: Vec<f64>,
    pub final_instance: OpinionInstance,
    pub final_equilibrium: EquilibriumResult,
    /// Number of candidate equilibria computed.
    pub evaluations: usize,
    /// Candidate equilibria computed up to each committed stooge.
    pub evaluation_trace: Vec<usize>,
}

impl SelectionResult {
    pub fn final_objective(&self) -> f64 {
        self.objective_trace.last().copied().unwrap_or(self.initial_objective)
    }
}

/// Shared state of the sequential selection loops: current instance, its
/// equilibrium and objective value.
pub(crate) struct SelectionState {
    objective: Objective,
    direction: Direction,
    theta_hat: f64,
    instance: OpinionInstance,
    x: EquilibriumResult,
    value: f64,
    result_assignment: StoogeAssignment,
    trace: Vec<f64>,
    gains: Vec<f64>,
    initial: f64,
    evaluations: usize,
    evaluation_trace: Vec<usize>,
}

/// Outcome of evaluating one candidate.
pub(crate) struct Evaluated {
    pub stooge: Stooge,
    pub gain: f64,
}

impl SelectionState {
    pub fn new(inst: &OpinionInstance, objective: Objective, direction: Direction, mode: &GainMode) -> Result<Self> {
        let theta_hat = metrics::theta_hat(inst.innate())?;
        let x = mode.initial(inst)?;
        let value = objective.value(theta_hat, &x.opinions);
        Ok(Self {
            objective,
            direction,
            theta_hat,
            instance: inst.clone(),
            x,
            value,
            result_assignment: StoogeAssignment::default(),
            trace: Vec::new(),
            gains: Vec::new(),
            initial: value,
            evaluations: 0,
            evaluation_trace: Vec::new(),
        })
    }

    /// Gain and equilibrium of adding `stooge` to the current state, or `None`
    /// if the change would leave the equilibrium non-unique.
    pub fn try_stooge(&self, stooge: Stooge, mode: &GainMode) -> Result<Option<(f64, EquilibriumResult)>> {
        let mut inst = self.instance.clone();
        let was_resistant = inst.resistance()[stooge.node] > 0.0;
        inst.set_resistance(stooge.node, stooge.resistance.value())?;
        if stooge.resistance == StoogeResistance::Zero && was_resistant {
            match dynamics::check_unique(&inst) {
                Err(Error::NonUniqueEquilibrium { .. }) => return Ok(None),
                other => other?,
            }
        }
        let eq = mode.after_change(&inst, stooge.node, &self.x.opinions)?;
        let value = self.objective.value(self.theta_hat, &eq.opinions);
        Ok(Some((self.direction.gain(self.value, value), eq)))
    }

    /// Gains of many candidates, computed in parallel; order matches input.
    /// Infeasible candidates get `-inf`.
    pub fn gains_of(&mut self, stooges: &[Stooge], mode: &GainMode) -> Result<Vec<f64>> {
        self.evaluations += stooges.len();
        stooges
            .par_iter()
            .map(|&s| Ok(self.try_stooge(s, mode)?.map_or(f64::NEG_INFINITY, |(g, _)| g)))
            .collect()
    }

    /// Equilibrium of a candidate already known to be feasible.
    pub fn equilibrium_of(&self, stooge: Stooge, mode: &GainMode) -> Result<EquilibriumResult> {
        Ok(self
            .try_stooge(stooge, mode)?
            .expect("a candidate with finite gain is feasible")
            .1)
    }

    pub fn commit(&mut self, stooge: Stooge, gain: f64, eq: EquilibriumResult) -> Result<()> {
        self.instance.set_resistance(stooge.node, stooge.resistance.value())?;
        self.value = self.objective.value(self.theta_hat, &eq.opinions);
        self.x = eq;
        self.result_assignment.push(stooge);
        self.trace.push(self.value);
        self.gains.push(gain);
        self.evaluation_trace.push(self.evaluations);
        Ok(())
    }

    pub fn finish(self) -> SelectionResult {
        SelectionResult {
            assignment: self.result_assignment,
            initial_objective: self.initial,
            objective_trace: self.trace,
            gains: self.gains,
            final_instance: self.instance,
            final_equilibrium: self.x,
            evaluations: self.evaluations,
            evaluation_trace: self.evaluation_trace,
        }
    }
}

/// Picks the best evaluated candidate: highest gain above `min_gain`, ties
/// broken by lower node index and then resistance 1.
pub(crate) fn best_candidate(evaluated: impl IntoIterator<Item = Evaluated>, min_gain: f64) -> Option<Evaluated> {
    let mut best: Option<Evaluated> = None;
    for e in evaluated {
        if !(e.gain > min_gain) {
            continue;
        }
        let better = match &best {
            None => true,
            Some(b) => e.gain > b.gain || (e.gain == b.gain && e.stooge.tie_key() < b.stooge.tie_key()),
        };
        if better {
            best = Some(e);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UndirectedGraph;

    #[test]
    fn assignment_codec() {
        let a: StoogeAssignment = "17:1;42:0".parse().unwrap();
        assert_eq!(
            a.stooges(),
            &[Stooge::new(17, StoogeResistance::One), Stooge::new(42, StoogeResistance::Zero)]
        );
        assert_eq!(a.to_string(), "17:1;42:0");
        assert!("".parse::<StoogeAssignment>().unwrap().is_empty());
        assert!("1:2".parse::<StoogeAssignment>().is_err());
        assert!("1:1;1:0".parse::<StoogeAssignment>().is_err());
        assert!("x:1".parse::<StoogeAssignment>().is_err());
    }

    #[test]
    fn apply_stooges_examples() {
        let g = UndirectedGraph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        let inst = OpinionInstance::uniform(&g, 0.5, vec![0.2, 0.9, 0.4]).unwrap();
        assert_eq!(apply_stooges(&inst, &StoogeAssignment::default()).unwrap(), inst);

        let pinned = apply_stooges(&inst, &"1:1".parse().unwrap()).unwrap();
        assert_eq!(pinned.resistance(), &[0.5, 1.0, 0.5]);
        let x = dynamics::solve(&pinned).unwrap().opinions;
        assert_eq!(x[1], 0.9);

        let dup = StoogeAssignment(vec![Stooge::new(0, StoogeResistance::One), Stooge::new(0, StoogeResistance::Zero)]);
        assert!(matches!(apply_stooges(&inst, &dup), Err(Error::DuplicateStooge(0))));
        assert!(apply_stooges(&inst, &"7:1".parse().unwrap()).is_err());
    }

    #[test]
    fn tie_break_prefers_low_node_then_one() {
        let cands = vec![
            Evaluated { stooge: Stooge::new(3, StoogeResistance::One), gain: 0.5 },
            Evaluated { stooge: Stooge::new(1, StoogeResistance::Zero), gain: 0.5 },
            Evaluated { stooge: Stooge::new(1, StoogeResistance::One), gain: 0.5 },
            Evaluated { stooge: Stooge::new(0, StoogeResistance::One), gain: 0.1 },
        ];
        let best = best_candidate(cands, 0.0).unwrap();
        assert_eq!(best.stooge, Stooge::new(1, StoogeResistance::One));
        assert!(best_candidate(vec![Evaluated { stooge: Stooge::new(0, StoogeResistance::One), gain: 0.0 }], 0.0).is_none());
    }

    #[test]
    fn direction_gain_sign() {
        assert_eq!(Direction::Maximize.gain(1.0, 3.0), 2.0);
        assert_eq!(Direction::Minimize.gain(1.0, 3.0), -2.0);
        assert_eq!("max".parse::<Direction>().unwrap(), Direction::Maximize);
        assert_eq!("Polarization".parse::<Objective>().unwrap(), Objective::Polarization);
        assert!("median".parse::<Objective>().is_err());
    }
}
