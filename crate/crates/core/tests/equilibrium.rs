use approx::assert_abs_diff_eq;
use asch::dynamics::{self, IterativeOptions};
use asch::graph::{gen_fixture, gen_gnp, gen_random_tree, sample_opinions, FixtureSpec, InfluenceMatrix, OpinionDistribution, OpinionInstance};
use proptest::prelude::*;

fn gnp_instance(n: usize, p: f64, seed: u64) -> OpinionInstance {
    let g = gen_gnp(n, p, seed).unwrap();
    let s = sample_opinions(n, &OpinionDistribution::default(), seed).unwrap();
    OpinionInstance::uniform(&g, 0.5, s).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[test]
fn iterative_matches_direct_solve() {
    for seed in 0..5 {
        let inst = gnp_instance(120, 0.05, seed);
        let exact = dynamics::solve(&inst).unwrap();
        let approx = dynamics::iterate_from_innate(&inst, &IterativeOptions::new(1e-10)).unwrap();
        assert!(approx.converged);
        assert!(max_diff(&exact.opinions, &approx.opinions) < 1e-8);
    }
}

#[test]
fn warm_start_after_resistance_change() {
    let inst = gnp_instance(150, 0.04, 3);
    let before = dynamics::solve(&inst).unwrap();
    let mut changed = inst.clone();
    changed.set_resistance(17, 1.0).unwrap();
    let warm = dynamics::iterate(&changed, &[17], before.opinions, &IterativeOptions::new(1e-11)).unwrap();
    let exact = dynamics::solve(&changed).unwrap();
    assert!(max_diff(&warm.opinions, &exact.opinions) < 1e-8);
}

#[test]
fn equilibrium_is_a_fixed_point_of_step() {
    let inst = gnp_instance(80, 0.1, 11);
    let x = dynamics::solve(&inst).unwrap().opinions;
    let y = dynamics::step(&inst, &x).unwrap();
    assert!(max_diff(&x, &y) <= dynamics::SOLVE_RESIDUAL);
}

#[test]
fn monte_carlo_two_node() {
    let g = asch::graph::UndirectedGraph::from_edges(2, [(0, 1)]).unwrap();
    let inst = OpinionInstance::uniform(&g, 0.5, vec![0.0, 1.0]).unwrap();
    for (v, expected) in [(0, 1.0 / 3.0), (1, 2.0 / 3.0)] {
        let est = dynamics::monte_carlo(&inst, v, 100_000, 5).unwrap();
        assert!((est.mean - expected).abs() <= 4.0 * est.std_error);
        assert_eq!(est, dynamics::monte_carlo(&inst, v, 100_000, 5).unwrap());
    }
}

#[test]
fn lollipop_equilibrium_is_zero() {
    let f = gen_fixture(&FixtureSpec::Lollipop { clique: 20, path: 30 }).unwrap();
    let x = dynamics::solve(&f.instance).unwrap().opinions;
    assert!(x.iter().all(|v| v.abs() <= 1e-9));
}

#[test]
fn non_submodular_empty_graph_starts_at_zero() {
    let f = gen_fixture(&FixtureSpec::NonSubmodular { size: 100, beta: 0.5 }).unwrap();
    let x = dynamics::solve(&f.instance).unwrap().opinions;
    let [v, w] = f.marked;
    assert_abs_diff_eq!(x[v], 1.0 / 3.0, epsilon = 1e-10);
    assert_abs_diff_eq!(x[w], -1.0 / 3.0, epsilon = 1e-10);
    assert!(x[102..].iter().all(|u| u.abs() <= 1e-10));
}

#[test]
fn non_submodular_pinned_v() {
    for beta in [0.3, 0.9, 0.99] {
        let f = gen_fixture(&FixtureSpec::NonSubmodular { size: 10, beta }).unwrap();
        let mut inst = f.instance.clone();
        inst.set_resistance(f.marked[0], 1.0).unwrap();
        let x = dynamics::solve(&inst).unwrap().opinions;
        assert_abs_diff_eq!(x[f.marked[1]], 2.0 * beta - 1.0, epsilon = 1e-10);
    }
}

#[test]
fn directed_chain_follows_the_source() {
    // 0 -> 1 -> 2, node 0 listens to itself.
    let w = InfluenceMatrix::from_entries(3, [(0, 0, 1.0), (0, 1, 1.0), (1, 2, 1.0)]).unwrap();
    let inst = OpinionInstance::new(w, vec![1.0, 0.0, 0.5], vec![0.8, 0.1, 0.0]).unwrap();
    let x = dynamics::solve(&inst).unwrap().opinions;
    assert_abs_diff_eq!(x[0], 0.8, epsilon = 1e-12);
    assert_abs_diff_eq!(x[1], 0.8, epsilon = 1e-12);
    assert_abs_diff_eq!(x[2], 0.4, epsilon = 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn equilibrium_stays_in_innate_hull(n in 5usize..60, seed in 0u64..1000, alpha in 0.05f64..1.0) {
        let g = gen_random_tree(n, seed).unwrap();
        let s = sample_opinions(n, &OpinionDistribution::default(), seed).unwrap();
        let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let inst = OpinionInstance::uniform(&g, alpha, s).unwrap();
        let x = dynamics::solve(&inst).unwrap();
        prop_assert!(x.residual <= dynamics::SOLVE_RESIDUAL);
        for v in x.opinions {
            prop_assert!(v >= lo - 1e-9 && v <= hi + 1e-9);
        }
    }

    #[test]
    fn shifting_innate_opinions_shifts_equilibrium(seed in 0u64..1000, c in -2.0f64..2.0) {
        let inst = gnp_instance(40, 0.1, seed);
        let shifted: Vec<f64> = inst.innate().iter().map(|s| s + c).collect();
        let moved = OpinionInstance::new(inst.shared_influence(), inst.resistance().to_vec(), shifted).unwrap();
        let a = dynamics::solve(&inst).unwrap().opinions;
        let b = dynamics::solve(&moved).unwrap().opinions;
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x + c - y).abs() < 1e-8);
        }
    }
}
