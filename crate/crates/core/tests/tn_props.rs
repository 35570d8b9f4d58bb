mod common;

use dualsim_core::driver::random_circuit;
use dualsim_core::tn::{
    circuit_to_network, contract_sliced, plan_cost, plan_exhaustive, plan_greedy, ContractionPlan,
};
use dualsim_core::BasisState;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn full_contraction_matches_oracle(n in 1usize..7, len in 0usize..25, seed in any::<u64>()) {
        let c = random_circuit(n, len, seed, None).unwrap();
        let net = circuit_to_network(&c, &BasisState::zeros(n), None).unwrap();
        let t = net.contract(&plan_greedy(&net).unwrap()).unwrap();
        prop_assert!(common::max_dev(t.data(), &common::simulate(&c, 0)) < 1e-9);
    }

    #[test]
    fn plans_agree(n in 1usize..5, len in 0usize..8, seed in any::<u64>()) {
        let c = random_circuit(n, len, seed, None).unwrap();
        let zeros = BasisState::zeros(n);
        let net = circuit_to_network(&c, &zeros, None).unwrap();
        let greedy = net.contract(&plan_greedy(&net).unwrap()).unwrap();
        let seq = net.contract(&ContractionPlan::sequential(net.len())).unwrap();
        prop_assert!(greedy.max_deviation(&seq) < 1e-10);
        if net.len() <= 12 {
            let ex_plan = plan_exhaustive(&net, 12).unwrap();
            prop_assert!(net.contract(&ex_plan).unwrap().max_deviation(&seq) < 1e-10);
            prop_assert!(
                plan_cost(&net, &ex_plan).unwrap().flops <= plan_cost(&net, &plan_greedy(&net).unwrap()).unwrap().flops
            );
        }
    }

    #[test]
    fn cost_model_counts_exactly(n in 1usize..6, len in 0usize..20, seed in any::<u64>()) {
        let c = random_circuit(n, len, seed, None).unwrap();
        let net = circuit_to_network(&c, &BasisState::zeros(n), Some(&BasisState::zeros(n))).unwrap();
        let plan = plan_greedy(&net).unwrap();
        let (_, counted) = net.contract_counted(&plan).unwrap();
        prop_assert_eq!(plan_cost(&net, &plan).unwrap().flops, counted);
    }

    #[test]
    fn sliced_sum_equals_whole(n in 2usize..6, len in 1usize..20, seed in any::<u64>(), k in 1usize..4) {
        let c = random_circuit(n, len, seed, None).unwrap();
        let zeros = BasisState::zeros(n);
        let net = circuit_to_network(&c, &zeros, Some(&zeros)).unwrap();
        let plan = plan_greedy(&net).unwrap();
        let whole = net.contract(&plan).unwrap().scalar_value().unwrap();
        let labels = net.closed_labels();
        let chosen: Vec<&str> = labels.iter().take(k).map(String::as_str).collect();
        for workers in [1, 3] {
            let s = contract_sliced(&net, &chosen, &plan, workers).unwrap().scalar_value().unwrap();
            prop_assert!((s - whole).norm() < 1e-9);
        }
    }

    #[test]
    fn plan_json_round_trip(n in 1usize..6, len in 0usize..20, seed in any::<u64>()) {
        let c = random_circuit(n, len, seed, None).unwrap();
        let net = circuit_to_network(&c, &BasisState::zeros(n), None).unwrap();
        let plan = plan_greedy(&net).unwrap();
        prop_assert_eq!(ContractionPlan::from_json(&plan.to_json()).unwrap(), plan);
    }
}

#[test]
fn projected_network_gives_the_amplitude() {
    let c = dualsim_core::driver::ghz(3).unwrap();
    let zeros = BasisState::zeros(3);
    let ones: BasisState = "111".parse().unwrap();
    for out in [&zeros, &ones] {
        let net = circuit_to_network(&c, &zeros, Some(out)).unwrap();
        let v = net.contract(&plan_greedy(&net).unwrap()).unwrap().scalar_value().unwrap();
        assert!((v.re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12 && v.im.abs() < 1e-12);
    }
}

#[test]
fn malformed_plans_are_rejected() {
    let c = dualsim_core::driver::ghz(2).unwrap();
    let net = circuit_to_network(&c, &BasisState::zeros(2), None).unwrap();
    assert!(net.contract(&ContractionPlan::sequential(net.len() - 1)).is_err());
    let dup = ContractionPlan::pair(ContractionPlan::Leaf(0), ContractionPlan::Leaf(0));
    assert!(net.contract(&dup).is_err());
    assert!(ContractionPlan::from_json("[0, [1").is_err());
}
