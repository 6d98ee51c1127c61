use snep_core::*;

#[test]
fn constant_factors_reproduce_the_deterministic_solution() {
    let inst = benchmark::deterministic::<f64>();
    let cfg = SolverConfig::default();
    let (scenario, bounds) = inst.mean_scenario();
    let (det, _) = solve_vi(&inst.vi_problem(&scenario, &bounds).unwrap(), &cfg, None).unwrap();
    let rep = monte_carlo_mean(&inst, 64, 9, &cfg, 2).unwrap();
    assert_eq!(rep.failed_solves, 0);
    for i in 0..5 {
        assert!((rep.mean[i] - det[i]).abs() < 1e-12);
        assert!(rep.standard_error[i] < 1e-12);
    }
}

#[test]
fn two_interval_cost_shock_matches_two_cells() {
    // r uniform on [0, 1): the two-cell grid with midpoint representatives
    // is the matching discretization; the operator is nearly affine in r.
    let inst = CournotInstance::new(
        benchmark::firms(),
        benchmark::PRICE_EXPONENT,
        benchmark::PRICE_FLOOR,
        RandomFactor64::uniform(0.0, 1.0).unwrap(),
        RandomFactor64::constant(5000.0).unwrap(),
    )
    .unwrap();
    let cfg = SolverConfig::default();
    let spec = GridSpec::new(5, 2, 1).with_rules(RepresentativeRule::Midpoint, RepresentativeRule::LowerEndpoint);
    let grid = Grid::new(&inst, &spec).unwrap();
    let disc = solve_streaming(&inst, &grid, &cfg, &SweepOptions::default()).unwrap().moments;
    let mc = monte_carlo_mean(&inst, 20_000, 5, &cfg, 1).unwrap();
    for i in 0..5 {
        assert!((mc.mean[i] - disc.mean[i]).abs() <= 3.0 * mc.standard_error[i], "component {i}");
    }
}

#[test]
fn reports_are_reproducible() {
    let inst = benchmark::stochastic::<f64>();
    let cfg = SolverConfig::default();
    let a = monte_carlo_mean(&inst, 3000, 17, &cfg, 1).unwrap();
    let b = monte_carlo_mean(&inst, 3000, 17, &cfg, 4).unwrap();
    let c = monte_carlo_mean(&inst, 3000, 17, &cfg, 2).unwrap();
    assert_eq!(a, b);
    assert_eq!(a, c);
    let d = monte_carlo_mean(&inst, 3000, 18, &cfg, 1).unwrap();
    assert_ne!(a.mean, d.mean);
}

#[test]
fn standard_error_halves_when_samples_quadruple() {
    let inst = benchmark::stochastic::<f64>();
    let cfg = SolverConfig::default();
    for seed in [1, 2, 3] {
        let small = monte_carlo_mean(&inst, 2000, seed, &cfg, 1).unwrap();
        let large = monte_carlo_mean(&inst, 8000, seed, &cfg, 1).unwrap();
        for i in 0..5 {
            let ratio = small.standard_error[i] / large.standard_error[i];
            assert!((ratio - 2.0).abs() <= 0.4, "seed {seed} component {i}: {ratio}");
        }
    }
}

#[test]
fn zero_samples_are_rejected() {
    let inst = benchmark::stochastic::<f64>();
    assert!(monte_carlo_mean(&inst, 0, 1, &SolverConfig::default(), 1).is_err());
}
