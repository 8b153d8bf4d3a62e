use bizland_core::equilibrium::{fixed_point_residuals, vi_gap};
use bizland_core::oracle::{grid_equilibrium, grid_optimum, share_coordinates, GridSpec, Objective};
use bizland_core::pricing::{solve_overall_so, PricingOptions};
use bizland_core::{fixtures, solve_combined, CombinedState, EquilibriumConfig, Regime};

#[test]
fn tiny_equilibrium_within_one_cell() {
    let model = fixtures::tiny();
    let grid = GridSpec::default();
    let (state, _) = solve_combined(&model, &EquilibriumConfig::default()).unwrap();
    let best = grid_equilibrium(&model, &grid).unwrap();
    let solver = share_coordinates(&model, &state, true);
    for (a, b) in solver.iter().zip(&best.coordinates) {
        assert!((a - b).abs() <= grid.cell(), "{solver:?} vs {:?}", best.coordinates);
    }
    assert_eq!(best.points, 200u64.pow(3));
}

#[test]
fn tiny_optimum_below_grid_minimum() {
    let model = fixtures::tiny();
    let grid = GridSpec::default();
    let so = solve_overall_so(&model, &EquilibriumConfig::default(), &PricingOptions::default()).unwrap();
    let best = grid_optimum(&model, &grid, &Objective::Overall).unwrap();
    assert!(so.objective <= best.value + best.slack);
    // The solver is free of grid error, so it should also beat the grid.
    assert!(so.objective <= best.value + 1e-9);
}

/// Gap of a state against every pure deviation on a fine simplex grid:
/// a dense lower bound for the exact linearized gap.
#[test]
fn gap_bounds_dense_enumeration() {
    let model = fixtures::tiny();
    let (state, _) = solve_combined(&model, &EquilibriumConfig::default()).unwrap();
    let shifted = {
        let mut f = state.path_flow.clone();
        f[0] += 0.3;
        f[1] -= 0.3; // same OD pair, so d and h are unchanged
        CombinedState::from_path_flows(&model.routes, f, state.firms.clone()).unwrap()
    };
    let exact = vi_gap(&model, Regime::Untolled, &shifted, 1e-12).unwrap();
    assert!(exact > 1e-4);
    assert!(vi_gap(&model, Regime::Untolled, &state, 1e-12).unwrap() < 1e-7);
    assert!(fixed_point_residuals(&model, Regime::Untolled, &state).max() < 1e-8);
    // The gap is a maximum over feasible directions, so it dominates the
    // linearized term at every grid point of the path-flow simplex.
    let alpha = model.logit.route();
    let weight = model.logit.nest_weight();
    let coef: Vec<f64> = (0..model.routes.path_count())
        .map(|p| {
            let od = model.routes.path_od(p);
            let s = model.routes.od_pair(od).1;
            let cost: f64 = model.routes.route(p).links.iter().map(|&a| {
                model.behavior.links[a].time(shifted.link_flow[a])
            }).sum();
            let v = model.behavior.attraction(s, shifted.dest_demand[s], shifted.firms[s]);
            shifted.path_flow[p].ln() / alpha + cost + weight * shifted.od_demand[od].ln() - v.trip
        })
        .collect();
    let o = model.network.total_demand();
    let n = 400;
    let mut best = 0.0_f64;
    for i in 0..=n {
        for j in 0..=(n - i) {
            let g = [o * i as f64 / n as f64, o * j as f64 / n as f64, o * (n - i - j) as f64 / n as f64];
            let term: f64 = (0..3).map(|p| coef[p] * (shifted.path_flow[p] - g[p])).sum();
            best = best.max(term);
        }
    }
    assert!(best <= exact + 1e-9);
    assert!(best >= exact - 1e-8);
}

#[test]
fn six_node_is_too_large() {
    let model = fixtures::six_node([40.0, 60.0]);
    assert!(grid_equilibrium(&model, &GridSpec::default()).is_err());
}
