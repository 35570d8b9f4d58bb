use dualsim_core::driver::{
    generate_benchmark, run, scaling_sweep, sweep_csv, Backend, Family, Metric, Mode, Payload, RunConfig,
    StrategyChoice,
};
use dualsim_core::BasisState;
use proptest::prelude::*;

fn config(backend: Backend, mode: Mode) -> RunConfig {
    RunConfig { backend, mode, ..RunConfig::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn backends_agree_on_benchmarks(fam in 0usize..3, n in 2usize..=10, seed in any::<u64>(), raw in any::<u64>()) {
        let family = [Family::Ghz, Family::GroverOracle, Family::Random][fam];
        let c = generate_benchmark(family, n, seed).unwrap();
        let basis = BasisState::from_index(n, raw & ((1 << n) - 1));
        for mode in [Mode::Full, Mode::Amplitude(basis)] {
            let r = run(&config(Backend::Both, mode), &c).unwrap();
            let cc = r.cross_check.as_ref().unwrap();
            prop_assert!(cc.agree && cc.max_deviation.unwrap() <= 1e-9);
        }
    }

    #[test]
    fn reports_are_deterministic(n in 2usize..8, seed in any::<u64>(), slices in 0usize..3, workers in 1usize..4) {
        let c = generate_benchmark(Family::Random, n, seed).unwrap();
        let mut cfg = config(Backend::Both, Mode::Full);
        let strip = |mut r: dualsim_core::driver::RunReport| {
            for b in &mut r.results {
                b.wall_ms = 0.0;
            }
            r
        };
        let a = strip(run(&cfg, &c).unwrap());
        let b = strip(run(&cfg, &c).unwrap());
        prop_assert_eq!(&a, &b);
        cfg.slices = slices;
        cfg.workers = workers;
        let sliced = run(&cfg, &c).unwrap();
        let d = sliced.results[1].payload.as_ref().unwrap()
            .max_deviation(a.results[1].payload.as_ref().unwrap()).unwrap();
        prop_assert!(d < 1e-12);
    }
}

#[test]
fn fidelity_mode_with_plan_strategy() {
    let g = generate_benchmark(Family::Random, 5, 4).unwrap();
    let mut cfg = config(Backend::Both, Mode::Fidelity(g.clone()));
    cfg.strategy = StrategyChoice::Plan;
    let r = run(&cfg, &g).unwrap();
    assert!(!r.diverged());
    assert!(matches!(r.results[0].payload, Some(Payload::Fidelity { equivalent: true, .. })));
}

#[test]
fn grover_sweep_is_linear_in_dd_and_exponential_in_tn() {
    let dd = scaling_sweep(Family::GroverOracle, 2..=10, Metric::DdGateNodes, 0).unwrap();
    for r in &dd {
        assert_eq!(r.value, 2 * r.n as u128 - 1);
    }
    let tn = scaling_sweep(Family::GroverOracle, 2..=10, Metric::TnGateTensorElements, 0).unwrap();
    for r in &tn {
        assert_eq!(r.value, 1u128 << (2 * r.n));
    }
    assert_eq!(sweep_csv(&tn).lines().count(), 10);
}

#[test]
fn tn_metrics_on_large_mcx_refuse_cleanly() {
    assert!(scaling_sweep(Family::GroverOracle, 16..=16, Metric::TnPlanFlops, 0).is_err());
}
