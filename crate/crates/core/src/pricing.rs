//! Social-cost objectives, the traveler and overall system optima, and the
//! pricing schemes that decentralize them.
//!
//! Both optima are found through their stationarity conditions, which have
//! the form of a combined equilibrium in which agents face
//! externality-adjusted costs:
//!
//! - traveler optimum (firms fixed) and the road-pricing equilibrium use
//!   `t + x t'` on links and `A + d dA/dd` at destinations;
//! - the overall optimum also credits `h dB/dd` to travelers and charges
//!   firms `B + d dA/dh + h dB/dh`.
//!
//! Because neither problem is known to have a unique stationary point, the
//! solvers run from several starts and keep the candidate with the lowest
//! objective; the overall optimum is also cross-checked against a direct
//! minimization.

use alloc::vec::Vec;

use crate::equilibrium::{self, fixed_point_residuals, multistart, GapReport, Solver};
use crate::math::{entropy_term, sup_norm};
use crate::oracle::{self, DirectOptions, Objective};
use crate::{Charges, CombinedState, EquilibriumConfig, Error, Model, Regime, Result};

/// Terms of the traveler and overall social-cost objectives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostBreakdown {
    /// `(1/alpha) sum f (ln f - 1)`
    pub route_entropy: f64,
    /// `(1/gamma - 1/alpha) sum q (ln q - 1)`
    pub destination_entropy: f64,
    /// `(1/beta) sum h (ln h - 1)`
    pub firm_entropy: f64,
    /// `sum x t(x)`
    pub travel_time: f64,
    /// `sum A(d, h) d`
    pub traveler_benefit: f64,
    /// `sum B(d, h) h`
    pub firm_benefit: f64,
    /// Traveler social cost (firms held as given).
    pub travelers: f64,
    /// Social cost of travelers and firms together.
    pub total: f64,
}

pub fn social_cost_total(model: &Model, state: &CombinedState) -> CostBreakdown {
    let logit = &model.logit;
    let floor = EquilibriumConfig::default().flow_floor;
    let sum_entropy = |v: &[f64]| v.iter().map(|&x| entropy_term(x, floor)).sum::<f64>();
    let route_entropy = sum_entropy(&state.path_flow) / logit.route();
    let destination_entropy = logit.nest_weight() * sum_entropy(&state.od_demand);
    let firm_entropy = sum_entropy(&state.firms) / logit.location();
    let travel_time = model
        .behavior
        .links
        .iter()
        .zip(&state.link_flow)
        .map(|(l, &x)| x * l.time(x.max(0.0)))
        .sum();
    let (mut traveler_benefit, mut firm_benefit) = (0.0, 0.0);
    for s in 0..model.destination_count() {
        let (d, h) = (state.dest_demand[s], state.firms[s]);
        let v = model.behavior.attraction(s, d, h);
        traveler_benefit += v.trip * d;
        firm_benefit += v.business * h;
    }
    let travelers = route_entropy + destination_entropy + travel_time - traveler_benefit;
    CostBreakdown {
        route_entropy,
        destination_entropy,
        firm_entropy,
        travel_time,
        traveler_benefit,
        firm_benefit,
        travelers,
        total: travelers + firm_entropy - firm_benefit,
    }
}

/// Traveler social cost at `state` for the firms recorded in it.
pub fn social_cost_travelers(model: &Model, state: &CombinedState) -> f64 {
    social_cost_total(model, state).travelers
}

/// Minimizes the traveler social cost for a fixed firm distribution by
/// solving the traveler equilibrium with externality-adjusted costs.
pub fn solve_relative_so(
    model: &Model,
    firms: &[f64],
    config: &EquilibriumConfig,
) -> Result<(CombinedState, GapReport)> {
    Solver::new(model, Regime::RoadPricing, config.clone())?.traffic(firms, None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Link tolls and entrance fees only.
    RoadOnly,
    /// Link tolls, entrance fees (or subsidies) and business taxes (or subsidies).
    Full,
}

/// Per-unit charges together with the state they were evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct PricingScheme {
    pub kind: SchemeKind,
    pub charges: Charges,
    pub evaluated_at: CombinedState,
}

impl PricingScheme {
    /// Revenue collected at the evaluation state (subsidies count negative).
    pub fn net_revenue(&self) -> f64 {
        let s = &self.evaluated_at;
        let c = &self.charges;
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        dot(&c.link_toll, &s.link_flow) + dot(&c.entrance_fee, &s.dest_demand) + dot(&c.business_tax, &s.firms)
    }
}

fn link_tolls(model: &Model, state: &CombinedState) -> Vec<f64> {
    model
        .behavior
        .links
        .iter()
        .zip(&state.link_flow)
        .map(|(l, &x)| l.marginal(x.max(0.0)))
        .collect()
}

/// Marginal-external-cost prices at `state`: link toll `x t'`, entrance fee
/// `-(d dA/dd + h dB/dd)` and business tax `-(d dA/dh + h dB/dh)`.
pub fn extract_pricing(model: &Model, state: &CombinedState) -> PricingScheme {
    let (mut entrance_fee, mut business_tax) = (Vec::new(), Vec::new());
    for s in 0..model.destination_count() {
        let (d, h) = (state.dest_demand[s], state.firms[s]);
        let v = model.behavior.attraction(s, d, h);
        entrance_fee.push(-(d * v.trip_dd + h * v.business_dd));
        business_tax.push(-(d * v.trip_dh + h * v.business_dh));
    }
    PricingScheme {
        kind: SchemeKind::Full,
        charges: Charges {
            link_toll: link_tolls(model, state),
            entrance_fee,
            business_tax,
        },
        evaluated_at: state.clone(),
    }
}

/// Road-only prices at `state`: link toll `x t'` and entrance fee
/// `-d dA/dd`, which is never negative.
pub fn road_pricing_scheme(model: &Model, state: &CombinedState) -> PricingScheme {
    let entrance_fee = (0..model.destination_count())
        .map(|s| {
            let d = state.dest_demand[s];
            -d * model.behavior.attraction(s, d, state.firms[s]).trip_dd
        })
        .collect();
    PricingScheme {
        kind: SchemeKind::RoadOnly,
        charges: Charges {
            link_toll: link_tolls(model, state),
            entrance_fee,
            business_tax: alloc::vec![0.0; model.destination_count()],
        },
        evaluated_at: state.clone(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PricingOptions {
    /// Solver starts: the uniform start plus `starts - 1` random ones.
    pub starts: usize,
    pub seed: u64,
    /// Candidates closer than this (sup-norm) count as the same solution.
    pub distinct_tolerance: f64,
    /// Fail with [`Error::MultipleSolutions`] instead of picking the best.
    pub reject_multiple: bool,
    /// Largest acceptable logit residual, relative to `max(1, |state|)`.
    pub kkt_tolerance: f64,
    /// Run the direct minimization cross-check for the overall optimum.
    pub cross_check: bool,
    pub direct: DirectOptions,
}

impl Default for PricingOptions {
    fn default() -> Self {
        Self {
            starts: 4,
            seed: 1,
            distinct_tolerance: 1e-6,
            reject_multiple: false,
            kkt_tolerance: 1e-8,
            cross_check: true,
            direct: DirectOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub state: CombinedState,
    pub report: GapReport,
    pub objective: f64,
}

/// Multi-start candidates, deduplicated, sorted by objective.
fn candidates(
    model: &Model,
    regime: Regime<'_>,
    config: &EquilibriumConfig,
    opts: &PricingOptions,
    objective: impl Fn(&CombinedState) -> f64,
) -> Result<Vec<Candidate>> {
    let runs = multistart(model, regime, opts.starts, opts.seed, config)?;
    let mut found: Vec<Candidate> = Vec::new();
    for (state, report) in runs.into_iter().flatten() {
        let kkt = oracle::kkt_residual(model, regime, &state).max();
        if kkt > opts.kkt_tolerance * state.scale().max(1.0) {
            continue;
        }
        if found
            .iter()
            .any(|c| c.state.sup_distance(&state) < opts.distinct_tolerance)
        {
            continue;
        }
        let value = objective(&state);
        found.push(Candidate {
            state,
            report,
            objective: value,
        });
    }
    if found.is_empty() {
        return Err(Error::NoKktPoint { starts: opts.starts });
    }
    found.sort_by(|a, b| a.objective.total_cmp(&b.objective));
    if opts.reject_multiple && found.len() > 1 {
        return Err(Error::MultipleSolutions { count: found.len() });
    }
    Ok(found)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadPricingOutcome {
    pub state: CombinedState,
    pub scheme: PricingScheme,
    pub report: GapReport,
    /// Traveler social cost at the selected solution.
    pub objective: f64,
    /// Every distinct solution found, best first.
    pub candidates: Vec<Candidate>,
}

/// Equilibrium in which travelers face marginal social costs while firms
/// keep their actual attraction; among the solutions found the one with
/// the lowest traveler social cost is selected and priced.
pub fn solve_uniform_road_pricing(
    model: &Model,
    config: &EquilibriumConfig,
    opts: &PricingOptions,
) -> Result<RoadPricingOutcome> {
    let found = candidates(model, Regime::RoadPricing, config, opts, |s| social_cost_travelers(model, s))?;
    let best = found[0].clone();
    Ok(RoadPricingOutcome {
        scheme: road_pricing_scheme(model, &best.state),
        state: best.state,
        report: best.report,
        objective: best.objective,
        candidates: found,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OverallOutcome {
    pub state: CombinedState,
    pub report: GapReport,
    /// Total social cost at the selected point.
    pub objective: f64,
    pub candidates: Vec<Candidate>,
    /// Lowest objective reached by direct minimization from the same starts.
    pub direct_objective: Option<f64>,
    /// Set when direct minimization found a lower objective than every
    /// stationary point, beyond `1e-6` relative.
    pub cross_check_warning: bool,
}

/// Overall system optimum: best stationary point over several starts.
pub fn solve_overall_so(model: &Model, config: &EquilibriumConfig, opts: &PricingOptions) -> Result<OverallOutcome> {
    let found = candidates(model, Regime::SystemOptimum, config, opts, |s| social_cost_total(model, s).total)?;
    let best = found[0].clone();
    let direct_objective = if opts.cross_check {
        (0..opts.starts.max(1))
            .map(|i| {
                let start = if i == 0 {
                    equilibrium::uniform_start(model)
                } else {
                    equilibrium::random_start(model, opts.seed.wrapping_add(i as u64))
                };
                oracle::minimize_direct(model, &Objective::Overall, &start, &opts.direct).value
            })
            .reduce(f64::min)
    } else {
        None
    };
    let cross_check_warning =
        direct_objective.is_some_and(|d| best.objective - d > 1e-6 * best.objective.abs().max(1.0));
    Ok(OverallOutcome {
        state: best.state,
        report: best.report,
        objective: best.objective,
        candidates: found,
        direct_objective,
        cross_check_warning,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupportVerdict {
    pub holds: bool,
    /// Sup-norm distance between the priced equilibrium and the evaluation state.
    pub state_distance: f64,
    /// `|C(priced) - C(evaluated)| / |C(evaluated)|` for the total social cost.
    pub cost_gap: f64,
    /// Logit residual of the evaluation state itself under the fixed prices.
    pub plug_in_residual: f64,
    pub priced_state: CombinedState,
    pub priced_report: GapReport,
}

pub const SUPPORT_STATE_TOLERANCE: f64 = 1e-6;
pub const SUPPORT_COST_TOLERANCE: f64 = 1e-8;

/// Solves the combined equilibrium with the scheme's charges held fixed
/// (from the uniform start) and checks that it reproduces the state the
/// scheme was evaluated at.
pub fn verify_support(model: &Model, scheme: &PricingScheme, config: &EquilibriumConfig) -> Result<SupportVerdict> {
    let regime = Regime::Priced(&scheme.charges);
    let (priced_state, priced_report) = Solver::new(model, regime, config.clone())?.combined(None)?;
    let target = &scheme.evaluated_at;
    let state_distance = priced_state.sup_distance(target);
    let reference = social_cost_total(model, target).total;
    let cost_gap = (social_cost_total(model, &priced_state).total - reference).abs() / reference.abs();
    let plug_in_residual = fixed_point_residuals(model, regime, target).max();
    Ok(SupportVerdict {
        holds: state_distance <= SUPPORT_STATE_TOLERANCE && cost_gap <= SUPPORT_COST_TOLERANCE,
        state_distance,
        cost_gap,
        plug_in_residual,
        priced_state,
        priced_report,
    })
}

/// Largest charge magnitude in a scheme.
pub fn max_charge(charges: &Charges) -> f64 {
    sup_norm(&charges.link_toll)
        .max(sup_norm(&charges.entrance_fee))
        .max(sup_norm(&charges.business_tax))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::network::{enumerate_routes, Link, Origin};
    use crate::{Attraction, Behavior, BusinessAttraction, LinkTime, LogitParams, Network, TripAttraction};
    use alloc::vec;
    use approx::assert_relative_eq;

    fn one_center(d: f64, h: f64) -> (Model, CombinedState) {
        let network = Network::new(
            vec![1, 2],
            vec![Link { tail: 1, head: 2 }],
            vec![Origin { node: 1, demand: d }],
            vec![2],
            h,
        )
        .unwrap();
        let behavior = Behavior {
            links: vec![LinkTime {
                free_flow: 1.0,
                coefficient: 1.0,
                power: 1.0,
            }],
            destinations: vec![Attraction {
                trip: TripAttraction {
                    base: 0.0,
                    firm_gain: 3.0,
                    crowding: 1.0,
                    crowding_quadratic: 0.0,
                },
                business: BusinessAttraction {
                    base: 0.0,
                    customer_gain: 2.0,
                    rivalry: 1.0,
                },
            }],
        };
        let model = Model::new(network, behavior, LogitParams::new(1.0, 1.0, 1.0).unwrap(), 10).unwrap();
        let routes = enumerate_routes(&model.network, 10).unwrap();
        let state = CombinedState::from_path_flows(&routes, vec![d], vec![h]).unwrap();
        (model, state)
    }

    #[test]
    fn closed_form_prices() {
        let (model, state) = one_center(4.0, 5.0);
        let scheme = extract_pricing(&model, &state);
        assert_relative_eq!(scheme.charges.entrance_fee[0], -6.0, epsilon = 1e-12);
        assert_relative_eq!(scheme.charges.business_tax[0], 3.0, epsilon = 1e-12);
        assert_relative_eq!(scheme.charges.link_toll[0], 4.0, epsilon = 1e-12);
        let road = road_pricing_scheme(&model, &state);
        assert_relative_eq!(road.charges.entrance_fee[0], 4.0, epsilon = 1e-12);
        assert_eq!(road.charges.business_tax[0], 0.0);
    }

    #[test]
    fn zero_state_has_zero_prices_and_cost() {
        let (model, mut state) = one_center(4.0, 5.0);
        state.path_flow[0] = 0.0;
        state.link_flow[0] = 0.0;
        state.od_demand[0] = 0.0;
        state.dest_demand[0] = 0.0;
        state.firms[0] = 0.0;
        let scheme = extract_pricing(&model, &state);
        assert_eq!(max_charge(&scheme.charges), 0.0);
        assert_eq!(social_cost_travelers(&model, &state), 0.0);
        assert_eq!(social_cost_total(&model, &state).total, 0.0);
    }

    #[test]
    fn breakdown_identity() {
        let model = fixtures::tiny();
        let state = equilibrium::random_start(&model, 11);
        let c = social_cost_total(&model, &state);
        assert_relative_eq!(
            c.total,
            c.travelers + c.firm_entropy - c.firm_benefit,
            epsilon = 1e-12 * c.total.abs().max(1.0)
        );
    }

    #[test]
    fn symmetric_road_pricing() {
        let model = fixtures::symmetric();
        let out = solve_uniform_road_pricing(&model, &EquilibriumConfig::default(), &PricingOptions::default()).unwrap();
        let fees = &out.scheme.charges.entrance_fee;
        assert!((fees[0] - fees[1]).abs() < 1e-9);
        assert!(fees.iter().all(|&u| u >= 0.0));
        assert!((out.state.firms[0] - 2.0).abs() < 1e-9);
        assert_eq!(out.candidates.len(), 1);
    }
}
