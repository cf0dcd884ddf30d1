use rayon::prelude::*;

use super::{apply_stooges, Direction, Objective, SelectionResult, Stooge, StoogeAssignment, StoogeResistance};
use crate::dynamics;
use crate::error::{Error, Result};
use crate::graph::{NodeId, OpinionInstance};
use crate::metrics;

pub const DEFAULT_BRUTE_FORCE_BUDGET: u128 = 10_000_000;

/// Number of configurations with at most `k` stooges out of `n` nodes:
/// `sum_{j <= k} C(n, j) 2^j`.
pub fn brute_force_evaluations(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for j in 0..=k.min(n) {
        if j > 0 {
            binom = binom * (n - j + 1) as u128 / j as u128;
        }
        total = total.saturating_add(binom.saturating_mul(1u128 << j.min(127)));
    }
    total
}

/// Lexicographic subsets of `0..n` of size `j`.
fn subsets(n: usize, j: usize) -> Vec<Vec<NodeId>> {
    let mut out = Vec::new();
    let mut cur: Vec<NodeId> = (0..j).collect();
    if j > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..j).rev().find(|&i| cur[i] != i + n - j) else {
            return out;
        };
        cur[i] += 1;
        for t in i + 1..j {
            cur[t] = cur[t - 1] + 1;
        }
    }
}

/// Stooges with resistance 1 come first, so every prefix of a feasible
/// assignment keeps at least the final assignment's resistances and is
/// feasible too.
fn assignment(subset: &[NodeId], mask: u64) -> StoogeAssignment {
    let mut stooges: Vec<Stooge> = subset
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let r = if mask >> i & 1 == 1 { StoogeResistance::One } else { StoogeResistance::Zero };
            Stooge::new(v, r)
        })
        .collect();
    stooges.sort_by_key(|s| (s.resistance == StoogeResistance::Zero, s.node));
    StoogeAssignment::new(stooges).expect("subsets have distinct nodes")
}

/// Exhaustive search over every stooge set of size at most `k` and every
/// resistance assignment, using exact equilibria. Among equally good
/// configurations the one enumerated first (fewest stooges, then
/// lexicographic nodes) wins.
pub fn brute_force(
    inst: &OpinionInstance,
    k: usize,
    objective: Objective,
    direction: Direction,
    budget: u128,
) -> Result<SelectionResult> {
    let n = inst.node_count();
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds node count {n}")));
    }
    let required = brute_force_evaluations(n, k);
    if required > budget {
        return Err(Error::BudgetExceeded { required, budget });
    }
    let theta_hat = metrics::theta_hat(inst.innate())?;
    // Configurations with a non-unique equilibrium are skipped.
    let evaluate = |a: &StoogeAssignment| -> Result<Option<f64>> {
        match dynamics::solve(&apply_stooges(inst, a)?) {
            Ok(x) => Ok(Some(objective.value(theta_hat, &x.opinions))),
            Err(Error::NonUniqueEquilibrium { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    };

    let initial = evaluate(&StoogeAssignment::default())?.ok_or(Error::NonUniqueEquilibrium { node: 0 })?;
    // (score, enumeration key); larger score wins, smaller key on ties.
    let mut best: (f64, (usize, usize, u64)) = (direction.gain(0.0, initial), (0, 0, 0));
    let mut best_assignment = StoogeAssignment::default();
    for j in 1..=k {
        let sets = subsets(n, j);
        let found = sets
            .par_iter()
            .enumerate()
            .map(|(idx, set)| -> Result<Scored> {
                let mut local: Scored = None;
                for mask in 0..(1u64 << j) {
                    let Some(value) = evaluate(&assignment(set, mask))? else {
                        continue;
                    };
                    let score = direction.gain(0.0, value);
                    if local.is_none_or(|(s, _)| score > s) {
                        local = Some((score, (j, idx, mask)));
                    }
                }
                Ok(local)
            })
            .try_fold(|| None, |acc, item| item.map(|it| pick(acc, it)))
            .try_reduce(|| None, |a, b| Ok(pick(a, b)))?;
        if let Some((score, key)) = found {
            if score > best.0 {
                best = (score, key);
                best_assignment = assignment(&sets[key.1], key.2);
            }
        }
    }

    let mut trace = Vec::with_capacity(best_assignment.len());
    let mut gains = Vec::with_capacity(best_assignment.len());
    let mut prev = initial;
    for len in 1..=best_assignment.len() {
        let value = evaluate(&best_assignment.prefix(len))?.expect("prefix of a feasible assignment");
        gains.push(direction.gain(prev, value));
        trace.push(value);
        prev = value;
    }
    let final_instance = apply_stooges(inst, &best_assignment)?;
    let final_equilibrium = dynamics::solve(&final_instance)?;
    let trace_len = trace.len();
    Ok(SelectionResult {
        assignment: best_assignment,
        initial_objective: initial,
        objective_trace: trace,
        gains,
        final_instance,
        final_equilibrium,
        evaluations: required as usize,
        evaluation_trace: vec![required as usize; trace_len],
    })
}

type Scored = Option<(f64, (usize, usize, u64))>;

fn pick(a: Scored, b: Scored) -> Scored {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => {
            if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
                Some(b)
            } else {
                Some(a)
            }
        }
    }
}
