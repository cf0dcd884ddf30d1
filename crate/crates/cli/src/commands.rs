use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rayon::prelude::*;

use asch::dynamics::{self, IterativeOptions};
use asch::graph::{gen_fixture, FixtureSpec, NodeId, OpinionInstance};
use asch::io::{self, ExperimentConfig, ExperimentRecord};
use asch::metrics::{self, MetricReport};
use asch::selection::{
    apply_stooges, greedy_lazy, Direction, GainMode, GreedyConfig, Objective, Stooge, StoogeAssignment,
    StoogeResistance,
};

use crate::args::{
    Algo, Cli, Command, CompareArgs, EquilibriumArgs, FixturesArgs, GenerateArgs, Method, SelectArgs, SolverArgs,
    SweepArgs,
};
use crate::run::{self, Run};
use crate::source::{self, Loaded};
use crate::UsageError;

/// Returns `false` when a checked property does not hold.
pub fn dispatch(cli: Cli) -> Result<bool> {
    let out_dir = cli.out_dir.as_deref();
    match cli.command {
        Command::Generate(a) => generate(a, out_dir).map(|_| true),
        Command::Equilibrium(a) => equilibrium(a).map(|_| true),
        Command::Select(a) => select(a, out_dir).map(|_| true),
        Command::Sweep(a) => sweep(a, out_dir).map(|_| true),
        Command::Compare(a) => compare(a).map(|_| true),
        Command::Fixtures(a) => fixtures(a),
    }
}

fn resolve(path: Option<PathBuf>, out_dir: Option<&Path>, default: &str) -> PathBuf {
    path.unwrap_or_else(|| out_dir.map_or_else(|| PathBuf::from(default), |d| d.join(default)))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn generate(args: GenerateArgs, out_dir: Option<&Path>) -> Result<()> {
    let loaded = source::load(&args.instance, args.seed)?;
    let prefix = resolve(args.out, out_dir, &loaded.dataset);
    if let Some(parent) = prefix.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    if let Some(g) = &loaded.graph {
        io::save_edge_list(g, with_suffix(&prefix, ".edges"))?;
    }
    io::save_opinions(loaded.instance.innate(), with_suffix(&prefix, ".opinions"))?;
    io::save_instance(&loaded.instance, with_suffix(&prefix, ".json"))?;
    println!(
        "wrote {}.{{json,opinions{}}}: {} nodes, {} influence entries",
        prefix.display(),
        if loaded.graph.is_some() { ",edges" } else { "" },
        loaded.instance.node_count(),
        loaded.instance.influence().nnz()
    );
    Ok(())
}

fn print_report(m: &MetricReport) {
    println!(
        "theta_hat={} theta_hat_star={} mse={} polarization={} bias_sq={}",
        io::format_float(m.theta_hat),
        io::format_float(m.theta_hat_star),
        io::format_float(m.mse),
        io::format_float(m.polarization),
        io::format_float(m.bias_sq)
    );
}

fn equilibrium(args: EquilibriumArgs) -> Result<()> {
    let inst = source::load(&args.instance, args.seed)?.instance;
    let x = match args.method {
        Method::Solve => dynamics::solve(&inst)?,
        Method::Iterate => {
            let opts = IterativeOptions { max_sweeps: args.max_sweeps, ..IterativeOptions::new(args.epsilon) };
            let r = dynamics::iterate_from_innate(&inst, &opts)?;
            if !r.converged {
                return Err(asch::Error::NotConverged { iterations: r.iterations, residual: r.residual }.into());
            }
            r
        }
        Method::MonteCarlo => {
            if args.nodes.is_empty() {
                bail!(UsageError("monte-carlo needs at least one --node".into()));
            }
            for &v in &args.nodes {
                let est = dynamics::monte_carlo(&inst, v, args.walks, args.seed)?;
                println!(
                    "node={v} mean={} std_error={} walks={}",
                    io::format_float(est.mean),
                    io::format_float(est.std_error),
                    est.walks
                );
            }
            return Ok(());
        }
    };
    println!("iterations={} residual={:e}", x.iterations, x.residual);
    print_report(&MetricReport::new(inst.innate(), &x.opinions)?);
    if let Some(path) = args.output {
        io::save_opinions(&x.opinions, path)?;
    }
    Ok(())
}

fn validate(dataset: &str, algo: Algo, objective: Objective, direction: Direction, seed: u64, s: &SolverArgs, output: &Path) -> Result<()> {
    let cfg = ExperimentConfig {
        dataset: dataset.to_owned(),
        objective,
        direction,
        algorithm: algo.name().to_owned(),
        k: s.k,
        epsilon: s.epsilon,
        phi: s.phi,
        seed,
        output: output.to_owned(),
    };
    cfg.validate()?;
    Ok(())
}

fn print_run(run: &Run, rows: &[ExperimentRecord]) {
    println!(
        "{} {} {} seed={} initial={} final={} stooges={} evaluations={}",
        run.algo.name(),
        run.objective,
        run.direction,
        run.seed,
        io::format_float(run.result.initial_objective),
        io::format_float(run.result.final_objective()),
        run.result.assignment.len(),
        run.result.evaluations
    );
    for r in rows {
        println!(
            "  k={} mse={} polarization={} bias_sq={} stooges={}",
            r.k_step,
            io::format_float(r.mse),
            io::format_float(r.polarization),
            io::format_float(r.bias_sq),
            r.stooges
        );
    }
}

fn select(args: SelectArgs, out_dir: Option<&Path>) -> Result<()> {
    let output = resolve(args.output, out_dir, "results.csv");
    let loaded = source::load(&args.instance, args.seed)?;
    validate(&loaded.dataset, args.algo, args.objective, args.direction, args.seed, &args.solver, &output)?;
    let run = run::select(&loaded.instance, args.algo, args.objective, args.direction, args.seed, &args.solver)?;
    let rows = run::records(&loaded.instance, &loaded.dataset, &run::fresh_run_id(), &run)?;
    print_run(&run, &rows);
    if rows.len() < args.solver.k {
        log::info!("stopped after {} of {} stooges: no remaining candidate improves the objective", rows.len(), args.solver.k);
    }
    io::append_records(&rows, &output)?;
    Ok(())
}

fn sweep(args: SweepArgs, out_dir: Option<&Path>) -> Result<()> {
    let output = resolve(args.output, out_dir, "results.csv");
    if args.seeds.is_empty() || args.algos.is_empty() || args.objectives.is_empty() || args.directions.is_empty() {
        bail!(UsageError("sweep needs at least one seed, algorithm, objective and direction".into()));
    }
    let instances: Vec<(u64, Loaded)> =
        args.seeds.iter().map(|&seed| Ok((seed, source::load(&args.instance, seed)?))).collect::<Result<_>>()?;
    let mut jobs = Vec::new();
    for (i, (seed, loaded)) in instances.iter().enumerate() {
        for &algo in &args.algos {
            for &objective in &args.objectives {
                for &direction in &args.directions {
                    validate(&loaded.dataset, algo, objective, direction, *seed, &args.solver, &output)?;
                    jobs.push((i, algo, objective, direction));
                }
            }
        }
    }
    let runs: Vec<(usize, Run)> = jobs
        .par_iter()
        .map(|&(i, algo, objective, direction)| {
            let (seed, loaded) = &instances[i];
            Ok((i, run::select(&loaded.instance, algo, objective, direction, *seed, &args.solver)?))
        })
        .collect::<Result<_>>()?;
    let mut all = Vec::new();
    for (i, run) in &runs {
        let loaded = &instances[*i].1;
        let rows = run::records(&loaded.instance, &loaded.dataset, &run::fresh_run_id(), run)?;
        print_run(run, &rows);
        all.extend(rows);
    }
    io::append_records(&all, &output)?;
    println!("appended {} rows to {}", all.len(), output.display());
    Ok(())
}

fn final_nodes(rows: &[ExperimentRecord], run_id: &str) -> Result<BTreeSet<NodeId>> {
    let Some(last) = rows.iter().filter(|r| r.run_id == run_id).max_by_key(|r| r.k_step) else {
        bail!(UsageError(format!("run {run_id:?} not found")));
    };
    Ok(last.stooges.parse::<StoogeAssignment>()?.nodes())
}

fn objective_value(inst: &OpinionInstance, a: &StoogeAssignment, objective: Objective) -> Result<f64> {
    let x = dynamics::solve(&apply_stooges(inst, a)?)?;
    Ok(objective.value(metrics::theta_hat(inst.innate())?, &x.opinions))
}

fn compare(args: CompareArgs) -> Result<()> {
    if let Some(results) = &args.results {
        let rows = io::read_records(results)?;
        let a = final_nodes(&rows, args.run_a.as_deref().expect("clap requires --run-a"))?;
        let b = final_nodes(&rows, args.run_b.as_deref().expect("clap requires --run-b"))?;
        println!("jaccard={}", io::format_float(metrics::jaccard(&a, &b)));
        return Ok(());
    }
    let cfg = GreedyConfig {
        phi: args.solver.phi,
        gain_mode: run::gain_mode(&args.solver),
        min_gain: args.solver.min_gain,
        candidates: None,
    };
    let mut table = Vec::new();
    for &seed in &args.seeds {
        let loaded = source::load(&args.instance, seed)?;
        let inst = &loaded.instance;
        let mut sets = Vec::new();
        for &direction in &args.directions {
            let picks: Vec<StoogeAssignment> = [Objective::Mse, Objective::Polarization]
                .par_iter()
                .map(|&o| Ok(greedy_lazy(inst, args.solver.k, o, direction, &cfg)?.assignment))
                .collect::<Result<_>>()?;
            let overlap = metrics::jaccard(&picks[0].nodes(), &picks[1].nodes());
            for (i, objective) in [Objective::Mse, Objective::Polarization].into_iter().enumerate() {
                let direct = objective_value(inst, &picks[i], objective)?;
                let transfer = objective_value(inst, &picks[1 - i], objective)?;
                let loss = direction.relative_loss(direct, transfer);
                println!(
                    "{} seed={seed} {direction} {objective}: direct={} transfer={} loss={} jaccard={}",
                    loaded.dataset,
                    io::format_float(direct),
                    io::format_float(transfer),
                    io::format_float(loss),
                    io::format_float(overlap)
                );
                table.push(vec![
                    loaded.dataset.clone(),
                    seed.to_string(),
                    direction.to_string(),
                    objective.to_string(),
                    io::format_float(direct),
                    io::format_float(transfer),
                    io::format_float(loss),
                    io::format_float(overlap),
                ]);
            }
            sets.push((direction, picks));
        }
        if let [(_, max), (_, min)] = &sets[..] {
            for (i, objective) in [Objective::Mse, Objective::Polarization].into_iter().enumerate() {
                println!(
                    "{} seed={seed} {objective}: jaccard(max, min)={}",
                    loaded.dataset,
                    io::format_float(metrics::jaccard(&max[i].nodes(), &min[i].nodes()))
                );
            }
        }
    }
    if let Some(path) = args.output {
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(["dataset", "seed", "direction", "objective", "direct", "transfer", "loss", "jaccard"])?;
        for row in &table {
            w.write_record(row)?;
        }
        w.flush()?;
    }
    Ok(())
}

fn check(ok: bool, what: String) -> bool {
    println!("{} {what}", if ok { "PASS" } else { "FAIL" });
    ok
}

fn fixtures(args: FixturesArgs) -> Result<bool> {
    let beta = args.beta;
    let f = gen_fixture(&FixtureSpec::NonSubmodular { size: args.size, beta })?;
    let [v, w] = f.marked;
    let pol = |a: &[Stooge]| objective_value(&f.instance, &StoogeAssignment::new(a.to_vec())?, Objective::Polarization);
    let base = pol(&[])?;
    let one = pol(&[Stooge::new(v, StoogeResistance::One)])?;
    let two = pol(&[Stooge::new(v, StoogeResistance::One), Stooge::new(w, StoogeResistance::Zero)])?;
    let (g1, g2) = (one - base, two - one);
    let mut ok = check(
        (g1 - beta * beta / 4.0).abs() <= args.tolerance,
        format!("nonsubmod: gain of v with resistance 1 = {} (limit {})", io::format_float(g1), beta * beta / 4.0),
    );
    ok &= check(
        (g2 - (1.0 - beta * beta) / 4.0).abs() <= args.tolerance,
        format!(
            "nonsubmod: then w with resistance 0 gains {} (limit {})",
            io::format_float(g2),
            (1.0 - beta * beta) / 4.0
        ),
    );
    ok &= check(g2 > g1, "nonsubmod: second gain exceeds first".into());
    let greedy = greedy_lazy(&f.instance, 2, Objective::Polarization, Direction::Maximize, &GreedyConfig::default())?;
    println!(
        "info nonsubmod greedy picks {} with gains {:?}",
        greedy.assignment,
        greedy.gains.iter().map(|&g| io::format_float(g)).collect::<Vec<_>>()
    );

    let f = gen_fixture(&FixtureSpec::Lollipop { clique: args.clique, path: args.path })?;
    let x = dynamics::solve(&f.instance)?;
    ok &= check(
        x.opinions.iter().all(|v| v.abs() <= 1e-9),
        "lollipop: equilibrium is zero before stooges".into(),
    );
    let cfg = GreedyConfig {
        gain_mode: GainMode::Exact,
        candidates: Some(f.marked.into_iter().collect()),
        ..GreedyConfig::default()
    };
    let r = greedy_lazy(&f.instance, 2, Objective::Mse, Direction::Maximize, &cfg)?;
    let first = r.gains.first().copied().unwrap_or(0.0);
    ok &= check(first > 1e-6, format!("lollipop: first gain {} is positive", io::format_float(first)));
    let second = second_gain(&f.instance, &r.assignment, &f.marked)?;
    ok &= check(second <= 1e-9, format!("lollipop: best second gain {second:e} is zero"));
    ok &= check(
        r.assignment.len() == 1,
        format!("lollipop: greedy stops after {} stooge(s): {} gains {:?}", r.assignment.len(), r.assignment, r.gains),
    );
    Ok(ok)
}

/// Best MSE gain of adding one more marked node to `chosen`.
fn second_gain(inst: &OpinionInstance, chosen: &StoogeAssignment, marked: &[NodeId]) -> Result<f64> {
    let Some(first) = chosen.stooges().first() else {
        return Ok(f64::INFINITY);
    };
    let base = objective_value(inst, chosen, Objective::Mse)?;
    let mut best = f64::NEG_INFINITY;
    for &node in marked.iter().filter(|&&u| u != first.node) {
        for r in StoogeResistance::PREFERENCE {
            let a = StoogeAssignment::new(vec![*first, Stooge::new(node, r)])?;
            match objective_value(inst, &a, Objective::Mse) {
                Ok(value) => best = best.max(value - base),
                Err(e) if e.downcast_ref::<asch::Error>().is_some_and(asch::Error::is_convergence_failure) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(best)
}
