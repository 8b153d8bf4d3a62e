use bizland_core::equilibrium::{
    check_uniqueness, fixed_point_residuals, multistart, random_start, uniqueness_bounds, Condition,
    UniquenessVerdict,
};
use bizland_core::network::validate_state;
use bizland_core::pricing::{solve_overall_so, solve_relative_so, solve_uniform_road_pricing, PricingOptions};
use bizland_core::{
    fixtures, solve_combined, solve_combined_from, solve_parametric_location, solve_parametric_traffic, vi_gap,
    EquilibriumConfig, Error, Model, Regime,
};
use proptest::prelude::*;

fn config() -> EquilibriumConfig {
    EquilibriumConfig::default()
}

#[test]
fn symmetric_fixture_splits_evenly() {
    let model = fixtures::symmetric();
    let (state, report) = solve_combined(&model, &config()).unwrap();
    assert!(report.converged);
    for s in 0..2 {
        assert!((state.od_demand[s] - 5.0).abs() < 1e-8);
        assert!((state.firms[s] - 2.0).abs() < 1e-8);
    }
    let so = solve_overall_so(&model, &config(), &PricingOptions::default()).unwrap();
    for s in 0..2 {
        assert!((so.state.od_demand[s] - 5.0).abs() < 1e-8);
        assert!((so.state.firms[s] - 2.0).abs() < 1e-8);
    }
}

fn check_regime(model: &Model, regime: Regime<'_>) {
    let (state, report) = solve_combined_from(model, regime, None, &config()).unwrap();
    assert!(report.converged);
    assert!(fixed_point_residuals(model, regime, &state).max() < 1e-8);
    assert!(report.max_residual() < 1e-8);
    assert!(validate_state(&state, &model.network, &model.routes, 1e-9).is_valid());
}

#[test]
fn residuals_vanish_in_every_regime() {
    for model in [fixtures::tiny(), fixtures::six_node(fixtures::sweep_demands(1))] {
        check_regime(&model, Regime::Untolled);
        check_regime(&model, Regime::RoadPricing);
        check_regime(&model, Regime::SystemOptimum);
        let (state, _) = solve_combined(&model, &config()).unwrap();
        assert!(vi_gap(&model, Regime::Untolled, &state, 1e-12).unwrap() < 1e-7);
    }
}

#[test]
fn parametric_location_matches_bisection() {
    // Two destinations: h1 solves h1 = T / (1 + exp(beta (B2(T - h1) - B1(h1)))).
    let model = fixtures::tiny();
    let demand = [6.5, 3.5];
    let (firms, report) = solve_parametric_location(&model, &demand, &config()).unwrap();
    assert!(report.converged);
    let t = model.network.total_firms();
    let beta = model.logit.location();
    let b = |s: usize, h: f64| model.behavior.attraction(s, demand[s], h).business;
    let g = |h: f64| h - t / (1.0 + (beta * (b(1, t - h) - b(0, h))).exp());
    let (mut lo, mut hi) = (0.0, t);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!((firms[0] - 0.5 * (lo + hi)).abs() < 1e-9);
    assert!((firms[0] + firms[1] - t).abs() < 1e-12);
}

#[test]
fn parametric_traffic_holds_firms() {
    let model = fixtures::tiny();
    let (state, report) = solve_parametric_traffic(&model, &[1.0, 4.0], &config()).unwrap();
    assert!(report.converged);
    assert_eq!(state.firms, vec![1.0, 4.0]);
    let r = fixed_point_residuals(&model, Regime::Untolled, &state);
    assert!(r.route.max(r.destination) < 1e-8);
}

#[test]
fn relative_optimum_lowers_traveler_cost() {
    let model = fixtures::tiny();
    let firms = [2.5, 2.5];
    let (eq, _) = solve_parametric_traffic(&model, &firms, &config()).unwrap();
    let (so, _) = solve_relative_so(&model, &firms, &config()).unwrap();
    let cost = |s| bizland_core::pricing::social_cost_travelers(&model, s);
    assert!(cost(&so) <= cost(&eq) + 1e-9);
}

#[test]
fn instance_meeting_conditions_has_one_solution() {
    let model = fixtures::tiny();
    assert!(matches!(
        check_uniqueness(&model.behavior, uniqueness_bounds(&model)),
        UniquenessVerdict::Satisfied { .. }
    ));
    let runs = multistart(&model, Regime::Untolled, 10, 99, &config()).unwrap();
    let states: Vec<_> = runs.into_iter().map(|r| r.unwrap().0).collect();
    for a in &states {
        for b in &states {
            assert!(a.sup_distance(b) < 1e-6);
        }
    }
}

#[test]
fn agglomerating_instance_has_witness() {
    let model = fixtures::tiny_agglomerating();
    let UniquenessVerdict::Violated(w) = check_uniqueness(&model.behavior, uniqueness_bounds(&model)) else {
        panic!("expected a violation");
    };
    let v = model.behavior.attraction(w.destination, w.demand, w.firms);
    let value = match w.condition {
        Condition::TravelerSide => v.trip_dd + 0.5 * v.trip_dh + 0.5 * v.business_dd,
        Condition::FirmSide => v.business_dh + 0.5 * v.business_dd + 0.5 * v.trip_dh,
    };
    assert!(value >= 0.0);
    assert_eq!(value, w.value);
}

#[test]
fn invalid_config_is_rejected() {
    let model = fixtures::tiny();
    let cfg = EquilibriumConfig {
        tolerance: -1.0,
        ..config()
    };
    assert!(matches!(solve_combined(&model, &cfg), Err(Error::InvalidConfig(_))));
}

#[test]
fn iteration_cap_reports_trace() {
    let model = fixtures::six_node([40.0, 60.0]);
    let cfg = EquilibriumConfig {
        max_iterations: 2,
        diagonalization_sweeps: 1,
        ..config()
    };
    match solve_combined(&model, &cfg) {
        Err(Error::NotConverged { trace, .. }) | Err(Error::OscillationDetected { trace, .. }) => {
            assert!(!trace.is_empty())
        }
        other => panic!("expected a convergence failure, got {other:?}"),
    }
}

#[test]
fn road_pricing_scheme_is_nonnegative() {
    let model = fixtures::six_node([40.0, 60.0]);
    let out = solve_uniform_road_pricing(&model, &config(), &PricingOptions::default()).unwrap();
    assert!(out.scheme.charges.link_toll.iter().all(|&t| t >= 0.0));
    assert!(out.scheme.charges.entrance_fee.iter().all(|&u| u >= 0.0));
    assert!(out.scheme.charges.business_tax.iter().all(|&v| v == 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn equilibrium_conserves_and_is_start_independent(o in 1.0f64..40.0, firms in 1.0f64..20.0, seed in 0u64..1000) {
        let mut model = fixtures::tiny().with_demands(&[o]).unwrap();
        model.network = bizland_core::Network::new(
            model.network.nodes().to_vec(),
            model.network.links().to_vec(),
            model.network.origins().to_vec(),
            model.network.destinations().to_vec(),
            firms,
        ).unwrap();
        let (a, report) = solve_combined(&model, &config()).unwrap();
        prop_assert!(report.converged);
        prop_assert!(validate_state(&a, &model.network, &model.routes, 1e-9).is_valid());
        prop_assert!(a.path_flow.iter().chain(&a.firms).all(|&v| v > 0.0));
        let start = random_start(&model, seed);
        let (b, _) = solve_combined_from(&model, Regime::Untolled, Some(&start), &config()).unwrap();
        prop_assert!(a.sup_distance(&b) < 1e-6);
    }
}
