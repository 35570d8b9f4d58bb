mod common;

use dualsim_core::driver::{equivalent_variant, mutate_single_gate, random_circuit};
use dualsim_core::path::{
    alternating_path, check_equivalence, default_sequential_path, execute_path, plan_to_path, Planner,
    SimulationPath, Step, StepKind, Strategy, TaskGraph,
};
use dualsim_core::tn::{circuit_to_network, plan_greedy};
use dualsim_core::{BasisState, Circuit, DdConfig, DdPackage};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

/// A uniformly random order of adjacent merges over `[state, g_0, …]`.
fn random_path(leaves: usize, seed: u64) -> SimulationPath {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    // (id, first leaf) per segment, in circuit order.
    let mut segs: Vec<(usize, usize)> = (0..leaves).map(|i| (i, i)).collect();
    let mut steps = Vec::new();
    while segs.len() > 1 {
        let i = rng.gen_range(0..segs.len() - 1);
        let (l, r) = (segs[i], segs[i + 1]);
        let kind = if l.1 == 0 { StepKind::Vector } else { StepKind::Operator };
        steps.push(Step { left: l.0, right: r.0, kind });
        segs[i] = (leaves + steps.len() - 1, l.1);
        segs.remove(i + 1);
    }
    SimulationPath::new(leaves, steps)
}

fn final_state(c: &Circuit, path: &SimulationPath) -> Vec<dualsim_core::Complex64> {
    let mut pkg = DdPackage::new(DdConfig::default());
    let graph = TaskGraph::simulation(c, &BasisState::zeros(c.num_qubits())).unwrap();
    path.validate(&graph).unwrap();
    let out = execute_path(&mut pkg, &graph, path).unwrap();
    assert!(out.peak_nodes >= out.final_nodes);
    pkg.statevector(out.result.as_vector().unwrap(), 20).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn every_path_gives_the_same_state(n in 1usize..6, len in 0usize..20, seed in any::<u64>(), ps in any::<u64>()) {
        let c = random_circuit(n, len, seed, None).unwrap();
        let oracle = common::simulate(&c, 0);
        prop_assert!(common::max_dev(&final_state(&c, &default_sequential_path(&c)), &oracle) < 1e-9);
        prop_assert!(common::max_dev(&final_state(&c, &random_path(len + 1, ps)), &oracle) < 1e-9);
        let net = circuit_to_network(&c, &BasisState::zeros(n), None).unwrap();
        let translated = plan_to_path(&plan_greedy(&net).unwrap(), &c).unwrap();
        prop_assert!(common::max_dev(&final_state(&c, &translated), &oracle) < 1e-9);
    }

    #[test]
    fn verdicts_match_oracle_fidelity(n in 1usize..9, len in 1usize..25, seed in any::<u64>(), mutate in any::<bool>()) {
        let g = random_circuit(n, len, seed, None).unwrap();
        let g2 = if mutate { mutate_single_gate(&g, seed) } else { equivalent_variant(&g, 6, seed) };
        let want = common::miter_fidelity(&g, &g2);
        for s in [Strategy::Sequential, Strategy::Alternating(1), Strategy::Alternating(2), Strategy::GreedyAlt, Strategy::PlanTranslated(Planner::Greedy)] {
            let v = check_equivalence(&g, &g2, &BasisState::zeros(n), s).unwrap();
            prop_assert!((v.fidelity - want.min(1.0)).abs() < 1e-8, "{:?}: {} vs {}", s, v.fidelity, want);
        }
    }

    #[test]
    fn paths_survive_json(len in 0usize..30, ps in any::<u64>()) {
        let p = random_path(len + 1, ps);
        prop_assert_eq!(SimulationPath::from_json(&p.to_json()).unwrap(), p);
    }
}

#[test]
fn alternation_returns_to_identity_after_each_pair() {
    for seed in 0..5 {
        let g = random_circuit(6, 20, seed, None).unwrap();
        let ginv = g.inverse();
        let mut pkg = DdPackage::new(DdConfig::default());
        let graph = TaskGraph::operator(&g.concatenate(&ginv).unwrap());
        let out = execute_path(&mut pkg, &graph, &alternating_path(&g, &ginv, 1).unwrap()).unwrap();
        for (i, nodes) in out.step_nodes.iter().enumerate() {
            if i % 2 == 0 {
                assert_eq!(*nodes, 6, "seed {seed}, step {i}");
            }
        }
    }
}

#[test]
fn sequential_plan_translates_to_the_default_path() {
    let c = random_circuit(5, 30, 9, None).unwrap();
    let plan = dualsim_core::tn::ContractionPlan::sequential(c.num_qubits() + c.len());
    assert_eq!(plan_to_path(&plan, &c).unwrap(), default_sequential_path(&c));
}

#[test]
fn invalid_paths_are_rejected() {
    let c = random_circuit(3, 4, 1, None).unwrap();
    let graph = TaskGraph::simulation(&c, &BasisState::zeros(3)).unwrap();
    // Non-adjacent operands.
    let bad = SimulationPath::new(5, vec![Step { left: 0, right: 2, kind: StepKind::Vector }]);
    assert!(bad.validate(&graph).is_err());
    // Wrong kind.
    let mut steps = default_sequential_path(&c).steps().to_vec();
    steps[0].kind = StepKind::Operator;
    assert!(SimulationPath::new(5, steps).validate(&graph).is_err());
}
