//! Equilibrium opinions of the generalized Friedkin–Johnsen dynamics
//!
//! ```text
//! x_v(t+1) = alpha_v * s_v + (1 - alpha_v) * sum_u w_uv * x_u(t)
//! ```
//!
//! computed three ways: a Gauss–Seidel linear solve of the fixed-point system,
//! the active-set iteration used by the greedy selection, and absorbing random
//! walks (a walk at `u` stops with probability `alpha_u` and reports `s_u`,
//! otherwise moves to an influencer `u'` with probability `w_{u'u}`).

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{NodeId, OpinionInstance};

/// Residual the exact solver guarantees.
pub const SOLVE_RESIDUAL: f64 = 1e-10;
/// Residual the exact solver aims for before stopping.
const SOLVE_TARGET: f64 = 1e-13;
const SOLVE_MAX_SWEEPS: usize = 1_000_000;
pub const DEFAULT_MAX_SWEEPS: usize = 1_000_000;
pub const WALK_STEP_CAP: usize = 1_000_000;
/// Active sets larger than this are swept in parallel.
const PARALLEL_SWEEP_MIN: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumResult {
    pub opinions: Vec<f64>,
    /// Sweeps performed; 0 for the direct solver.
    pub iterations: usize,
    pub converged: bool,
    /// Max per-node update magnitude in the final sweep (iterative), or the
    /// fixed-point residual (direct).
    pub residual: f64,
}

fn check_len(inst: &OpinionInstance, x: &[f64]) -> Result<()> {
    if x.len() != inst.node_count() {
        return Err(Error::DimensionMismatch {
            what: "opinion vector",
            expected: inst.node_count(),
            actual: x.len(),
        });
    }
    Ok(())
}

#[inline]
fn update(inst: &OpinionInstance, v: NodeId, x: &[f64]) -> f64 {
    let alpha = inst.resistance()[v];
    alpha * inst.innate()[v] + (1.0 - alpha) * inst.influence().weighted_input(v, x)
}

/// One synchronous application of the update rule to every node.
pub fn step(inst: &OpinionInstance, x: &[f64]) -> Result<Vec<f64>> {
    check_len(inst, x)?;
    Ok((0..inst.node_count()).map(|v| update(inst, v, x)).collect())
}

/// `max_v |x_v - update_v(x)|`.
pub fn fixed_point_residual(inst: &OpinionInstance, x: &[f64]) -> f64 {
    (0..inst.node_count())
        .map(|v| (x[v] - update(inst, v, x)).abs())
        .fold(0.0, f64::max)
}

/// Fails with [`Error::NonUniqueEquilibrium`] when some node cannot reach a
/// node with positive resistance by following influencers. This is exactly the
/// case in which the fixed-point system is singular.
pub fn check_unique(inst: &OpinionInstance) -> Result<()> {
    let n = inst.node_count();
    let w = inst.influence();
    let mut reaches = vec![false; n];
    let mut queue: VecDeque<NodeId> = (0..n).filter(|&v| inst.resistance()[v] > 0.0).collect();
    for &v in &queue {
        reaches[v] = true;
    }
    while let Some(a) = queue.pop_front() {
        for &(z, _) in w.influencees(a) {
            if !reaches[z] {
                reaches[z] = true;
                queue.push_back(z);
            }
        }
    }
    match reaches.iter().position(|&r| !r) {
        Some(node) => Err(Error::NonUniqueEquilibrium { node }),
        None => Ok(()),
    }
}

/// Exact equilibrium: solves `(I - diag(1 - alpha) W^T) x = diag(alpha) s`
/// by Gauss–Seidel to a fixed-point residual of at most [`SOLVE_RESIDUAL`].
pub fn solve(inst: &OpinionInstance) -> Result<EquilibriumResult> {
    check_unique(inst)?;
    let n = inst.node_count();
    let w = inst.influence();
    let alpha = inst.resistance();
    let s = inst.innate();
    let mut x = s.to_vec();
    let mut residual = f64::INFINITY;
    for sweep in 0..SOLVE_MAX_SWEEPS {
        let mut max_change: f64 = 0.0;
        for v in 0..n {
            let mut diag = 0.0;
            let mut off = 0.0;
            for &(u, wt) in w.influencers(v) {
                if u == v {
                    diag = wt;
                } else {
                    off += wt * x[u];
                }
            }
            let keep = 1.0 - alpha[v];
            let new = (alpha[v] * s[v] + keep * off) / (1.0 - keep * diag);
            max_change = max_change.max((new - x[v]).abs());
            x[v] = new;
        }
        // The residual check costs a full pass; only pay for it once the
        // updates have become tiny.
        if max_change <= SOLVE_TARGET || sweep % 64 == 63 {
            residual = fixed_point_residual(inst, &x);
            if residual <= SOLVE_TARGET || (max_change <= SOLVE_TARGET && residual <= SOLVE_RESIDUAL) {
                return Ok(EquilibriumResult {
                    opinions: x,
                    iterations: 0,
                    converged: true,
                    residual,
                });
            }
        }
    }
    Err(Error::NotConverged {
        iterations: SOLVE_MAX_SWEEPS,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterativeOptions {
    /// A node whose update changes its opinion by less than this is deactivated.
    pub tolerance: f64,
    /// When a node changes by at least `tolerance`, every node it influences
    /// with weight above this threshold is activated.
    pub activation_threshold: f64,
    pub max_sweeps: usize,
}

impl IterativeOptions {
    pub fn new(tolerance: f64) -> Self {
        Self {
            tolerance,
            activation_threshold: tolerance,
            max_sweeps: DEFAULT_MAX_SWEEPS,
        }
    }
}

impl Default for IterativeOptions {
    fn default() -> Self {
        Self::new(1e-5)
    }
}

/// Active-set fixed-point iteration starting from `x0`.
///
/// Each sweep updates the active nodes synchronously from the previous
/// iterate. Nodes that moved by less than the tolerance drop out; nodes that
/// moved more stay active and activate the nodes they influence. Hitting
/// `max_sweeps` with active nodes left returns `converged = false`.
pub fn iterate(
    inst: &OpinionInstance,
    active: &[NodeId],
    x0: Vec<f64>,
    opts: &IterativeOptions,
) -> Result<EquilibriumResult> {
    check_len(inst, &x0)?;
    if !(opts.tolerance > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance {} must be positive", opts.tolerance)));
    }
    let n = inst.node_count();
    if let Some(&node) = active.iter().find(|&&v| v >= n) {
        return Err(Error::NodeOutOfRange { node, n });
    }
    let w = inst.influence();
    let mut x = x0;
    let mut marked = vec![false; n];
    let mut current: Vec<NodeId> = Vec::with_capacity(active.len());
    for &v in active {
        if !marked[v] {
            marked[v] = true;
            current.push(v);
        }
    }
    let mut next: Vec<NodeId> = Vec::new();
    let mut updates: Vec<f64> = Vec::new();
    let mut sweeps = 0;
    let mut residual: f64 = 0.0;

    while !current.is_empty() {
        if sweeps == opts.max_sweeps {
            return Ok(EquilibriumResult {
                opinions: x,
                iterations: sweeps,
                converged: false,
                residual,
            });
        }
        for &v in &current {
            marked[v] = false;
        }
        updates.clear();
        if current.len() >= PARALLEL_SWEEP_MIN {
            current.par_iter().map(|&v| update(inst, v, &x)).collect_into_vec(&mut updates);
        } else {
            updates.extend(current.iter().map(|&v| update(inst, v, &x)));
        }

        residual = 0.0;
        next.clear();
        for (&v, &new) in current.iter().zip(&updates) {
            let change = (new - x[v]).abs();
            residual = residual.max(change);
            if change >= opts.tolerance {
                if !marked[v] {
                    marked[v] = true;
                    next.push(v);
                }
                for &(z, wt) in w.influencees(v) {
                    if wt > opts.activation_threshold && !marked[z] {
                        marked[z] = true;
                        next.push(z);
                    }
                }
            }
        }
        for (&v, &new) in current.iter().zip(&updates) {
            x[v] = new;
        }
        std::mem::swap(&mut current, &mut next);
        sweeps += 1;
    }
    Ok(EquilibriumResult {
        opinions: x,
        iterations: sweeps,
        converged: true,
        residual,
    })
}

/// Iterates from the innate opinions with every node active.
pub fn iterate_from_innate(inst: &OpinionInstance, opts: &IterativeOptions) -> Result<EquilibriumResult> {
    let all: Vec<NodeId> = (0..inst.node_count()).collect();
    iterate(inst, &all, inst.innate().to_vec(), opts)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub walks: usize,
}

/// Estimates `x*_v` as the mean innate opinion at absorption over `walks`
/// independent walks. Walk `i` uses stream `i` of a generator seeded by `seed`.
pub fn monte_carlo(inst: &OpinionInstance, v: NodeId, walks: usize, seed: u64) -> Result<MonteCarloEstimate> {
    let n = inst.node_count();
    if v >= n {
        return Err(Error::NodeOutOfRange { node: v, n });
    }
    if walks == 0 {
        return Err(Error::InvalidParameter("need at least one walk".into()));
    }
    let samples: Vec<f64> = (0..walks)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            absorb(inst, v, &mut rng)
        })
        .collect::<Result<_>>()?;

    let count = walks as f64;
    let mean = samples.iter().sum::<f64>() / count;
    let std_error = if walks > 1 {
        let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    Ok(MonteCarloEstimate { mean, std_error, walks })
}

fn absorb(inst: &OpinionInstance, start: NodeId, rng: &mut impl Rng) -> Result<f64> {
    let w = inst.influence();
    let alpha = inst.resistance();
    let mut at = start;
    for _ in 0..WALK_STEP_CAP {
        if alpha[at] >= 1.0 || (alpha[at] > 0.0 && rng.random::<f64>() < alpha[at]) {
            return Ok(inst.innate()[at]);
        }
        let column = w.influencers(at);
        let mut r = rng.random::<f64>();
        let mut next = column.last().expect("columns are nonempty").0;
        for &(u, wt) in column {
            if r < wt {
                next = u;
                break;
            }
            r -= wt;
        }
        at = next;
    }
    Err(Error::WalkCapExceeded {
        start,
        at,
        cap: WALK_STEP_CAP,
    })
}
