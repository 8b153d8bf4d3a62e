use bizland_core::equilibrium::{random_start, uniform_start};
use bizland_core::oracle::{minimize_direct, objective_value, DirectOptions, Objective};
use bizland_core::pricing::{
    extract_pricing, social_cost_total, social_cost_travelers, solve_overall_so, solve_relative_so, verify_support,
    PricingOptions, PricingScheme,
};
use bizland_core::{fixtures, solve_combined, Charges, EquilibriumConfig, Model};

fn config() -> EquilibriumConfig {
    EquilibriumConfig::default()
}

#[test]
fn social_cost_matches_direct_summation() {
    for model in [fixtures::symmetric(), fixtures::tiny(), fixtures::six_node([55.0, 75.0])] {
        for seed in 0..5 {
            let state = random_start(&model, seed);
            let total = social_cost_total(&model, &state);
            let direct = objective_value(&model, &Objective::Overall, &state);
            assert!((total.total - direct).abs() <= 1e-10 * direct.abs().max(1.0));
            let travelers = objective_value(
                &model,
                &Objective::Travelers {
                    firms: state.firms.clone(),
                },
                &state,
            );
            assert!((total.travelers - travelers).abs() <= 1e-10 * travelers.abs().max(1.0));
        }
    }
}

#[test]
fn relative_optimum_matches_direct_minimization() {
    let model = fixtures::six_node([50.0, 70.0]);
    let firms = vec![20.0, 30.0];
    let (so, _) = solve_relative_so(&model, &firms, &config()).unwrap();
    let objective = Objective::Travelers { firms: firms.clone() };
    let direct = minimize_direct(&model, &objective, &uniform_start(&model), &DirectOptions::default());
    let value = social_cost_travelers(&model, &so);
    assert!(direct.value >= value - 1e-8 * value.abs());
    assert!(direct.state.sup_distance(&so) < 1e-5, "{}", direct.state.sup_distance(&so));
}

#[test]
fn overall_optimum_matches_direct_minimization() {
    let model = fixtures::tiny();
    let out = solve_overall_so(&model, &config(), &PricingOptions::default()).unwrap();
    assert!(!out.cross_check_warning);
    let direct = out.direct_objective.unwrap();
    assert!((direct - out.objective).abs() < 1e-8 * out.objective.abs().max(1.0));
    let (eq, _) = solve_combined(&model, &config()).unwrap();
    assert!(out.objective <= social_cost_total(&model, &eq).total);
}

fn optimum_scheme(model: &Model) -> PricingScheme {
    let out = solve_overall_so(model, &config(), &PricingOptions::default()).unwrap();
    extract_pricing(model, &out.state)
}

#[test]
fn prices_support_the_optimum() {
    for model in [fixtures::tiny(), fixtures::six_node([40.0, 60.0])] {
        let scheme = optimum_scheme(&model);
        let verdict = verify_support(&model, &scheme, &config()).unwrap();
        assert!(verdict.holds, "distance {}", verdict.state_distance);
        assert!(verdict.plug_in_residual < 1e-8);
    }
}

#[test]
fn zero_prices_do_not_support_the_optimum() {
    let model = fixtures::tiny();
    let mut scheme = optimum_scheme(&model);
    scheme.charges = Charges::zero(model.link_count(), model.destination_count());
    let verdict = verify_support(&model, &scheme, &config()).unwrap();
    assert!(!verdict.holds);
    assert!(verdict.state_distance > 1e-3);
}

#[test]
fn extracted_prices_are_externalities() {
    let model = fixtures::tiny();
    let scheme = optimum_scheme(&model);
    let state = &scheme.evaluated_at;
    for s in 0..2 {
        let (d, h) = (state.dest_demand[s], state.firms[s]);
        let v = model.behavior.attraction(s, d, h);
        assert!((scheme.charges.entrance_fee[s] + d * v.trip_dd + h * v.business_dd).abs() < 1e-12);
        assert!((scheme.charges.business_tax[s] + d * v.trip_dh + h * v.business_dh).abs() < 1e-12);
    }
    for (a, link) in model.behavior.links.iter().enumerate() {
        let x = state.link_flow[a];
        assert!((scheme.charges.link_toll[a] - x * link.derivative(x)).abs() < 1e-12);
    }
}
