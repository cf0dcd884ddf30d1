use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::Result;

use asch::dynamics;
use asch::graph::OpinionInstance;
use asch::io::ExperimentRecord;
use asch::metrics::MetricReport;
use asch::selection::{
    apply_stooges, baseline_select, brute_force, greedy_lazy, BaselineStrategy, Direction, GainMode, GreedyConfig,
    Objective, SelectionResult,
};

use crate::args::{Algo, SolverArgs};

/// One selection run and how long it took.
pub struct Run {
    pub algo: Algo,
    pub objective: Objective,
    pub direction: Direction,
    pub seed: u64,
    pub result: SelectionResult,
    pub elapsed_ms: f64,
}

pub fn gain_mode(solver: &SolverArgs) -> GainMode {
    if solver.exact {
        GainMode::Exact
    } else {
        GainMode::incremental(solver.epsilon)
    }
}

pub fn select(
    inst: &OpinionInstance,
    algo: Algo,
    objective: Objective,
    direction: Direction,
    seed: u64,
    solver: &SolverArgs,
) -> Result<Run> {
    let mode = gain_mode(solver);
    let start = Instant::now();
    let baseline = |strategy| {
        baseline_select(inst, solver.k, strategy, objective, direction, seed, &mode, solver.min_gain)
    };
    let result = match algo {
        Algo::Greedy => {
            let cfg = GreedyConfig { phi: solver.phi, gain_mode: mode, min_gain: solver.min_gain, candidates: None };
            greedy_lazy(inst, solver.k, objective, direction, &cfg)?
        }
        Algo::Random => baseline(BaselineStrategy::Random)?,
        Algo::Maxdegree => baseline(BaselineStrategy::MaxDegree)?,
        Algo::Centrality => baseline(BaselineStrategy::Centrality)?,
        Algo::Brute => brute_force(inst, solver.k, objective, direction, solver.budget)?,
    };
    Ok(Run { algo, objective, direction, seed, result, elapsed_ms: start.elapsed().as_secs_f64() * 1e3 })
}

static RUN_COUNTER: AtomicU64 = AtomicU64::new(0);

pub fn fresh_run_id() -> String {
    let nanos = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_nanos());
    format!("{nanos:x}-{}", RUN_COUNTER.fetch_add(1, Ordering::Relaxed))
}

/// One row per committed stooge. Metrics come from exact equilibria of each
/// prefix of the selected assignment.
pub fn records(inst: &OpinionInstance, dataset: &str, run_id: &str, run: &Run) -> Result<Vec<ExperimentRecord>> {
    let a = &run.result.assignment;
    (1..=a.len())
        .map(|step| {
            let prefix = a.prefix(step);
            let x = dynamics::solve(&apply_stooges(inst, &prefix)?)?;
            let m = MetricReport::new(inst.innate(), &x.opinions)?;
            Ok(ExperimentRecord {
                run_id: run_id.to_owned(),
                dataset: dataset.to_owned(),
                algorithm: run.algo.name().to_owned(),
                objective: run.objective,
                direction: run.direction,
                k_step: step,
                seed: run.seed,
                mse: m.mse,
                polarization: m.polarization,
                bias_sq: m.bias_sq,
                theta_hat: m.theta_hat,
                theta_hat_star: m.theta_hat_star,
                elapsed_ms: run.elapsed_ms,
                evaluations: run.result.evaluation_trace[step - 1],
                stooges: prefix.to_string(),
            })
        })
        .collect()
}
