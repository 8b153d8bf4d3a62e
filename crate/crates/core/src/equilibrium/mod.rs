//! Parametric traffic, parametric location and combined equilibria.
//!
//! Travelers respond to link flows `x`, destination demands `d` and firms
//! `h` through the nested logit (destination, then route); firms respond to
//! `(d, h)` through the location logit. An equilibrium is a fixed point of
//! these responses. The solvers search in the reduced space `(x, d, h)` and
//! rebuild the full state from one final response, so returned states are
//! feasible up to rounding.

mod fixed_point;
pub mod logit;
mod uniqueness;

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math::{ln, sup_distance, sup_norm};
use crate::network::validate_state;
use crate::{CombinedState, Error, Model, Regime, Result};

pub use uniqueness::{check_uniqueness, uniqueness_bounds, Condition, StateBounds, UniquenessVerdict, Witness};

/// Step schedule for averaging iterates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Damping {
    /// Method of successive averages: step `1/n` at the `n`-th update.
    Msa,
    /// Constant step in `(0, 1]`.
    Fixed(f64),
}

impl Damping {
    pub fn step(&self, n: usize) -> f64 {
        match *self {
            Damping::Msa => 1.0 / n.max(1) as f64,
            Damping::Fixed(s) => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumConfig {
    /// Stop when the sup-norm residual relative to `max(1, |z|)` drops below this.
    pub tolerance: f64,
    /// Iteration cap of each fixed-point search.
    pub max_iterations: usize,
    /// Averaging of the firm distribution between diagonalization sweeps.
    pub damping: Damping,
    /// Damped step used when a Newton step is rejected.
    pub inner_step: f64,
    /// Floor applied to flows inside logarithms.
    pub flow_floor: f64,
    /// Upper bound on alternating traffic/location sweeps before the joint solve.
    pub diagonalization_sweeps: usize,
    /// Joint residual at which diagonalization hands over to the joint solve.
    pub switch_tolerance: f64,
    /// Iterations without residual improvement that count as oscillation.
    pub oscillation_window: usize,
}

impl Default for EquilibriumConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            max_iterations: 300,
            damping: Damping::Msa,
            inner_step: 0.5,
            flow_floor: 1e-12,
            diagonalization_sweeps: 25,
            switch_tolerance: 1e-6,
            oscillation_window: 60,
        }
    }
}

impl EquilibriumConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(m.into()));
        if !(self.tolerance > 0.0) {
            return bad("tolerance must be positive");
        }
        if !(self.inner_step > 0.0 && self.inner_step <= 1.0) {
            return bad("inner step must lie in (0, 1]");
        }
        if let Damping::Fixed(s) = self.damping {
            if !(s > 0.0 && s <= 1.0) {
                return bad("fixed damping step must lie in (0, 1]");
            }
        }
        if !(self.flow_floor > 0.0) {
            return bad("flow floor must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        Ok(())
    }

    fn inner(&self) -> fixed_point::Options {
        fixed_point::Options {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            damping: Damping::Fixed(self.inner_step),
            oscillation_window: self.oscillation_window,
        }
    }
}

/// Convergence certificate of a solver run.
#[derive(Debug, Clone, PartialEq)]
pub struct GapReport {
    /// Gap of the variational inequality solved (traffic, location or both blocks).
    pub vi_gap: f64,
    /// Sup-norm deviation of path flows from the route logit.
    pub route_residual: Option<f64>,
    /// Sup-norm deviation of OD demands from the destination logit.
    pub destination_residual: Option<f64>,
    /// Sup-norm deviation of firms from the location logit.
    pub location_residual: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Scaled residual after every iteration, concatenated across phases.
    pub trace: Vec<f64>,
}

impl GapReport {
    pub fn max_residual(&self) -> f64 {
        [self.route_residual, self.destination_residual, self.location_residual]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }
}

/// Sup-norm residuals of the three logit equalities at a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub route: f64,
    pub destination: f64,
    pub location: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.route.max(self.destination).max(self.location)
    }
}

/// Traveler and firm responses under a regime.
pub(crate) struct Responses<'a> {
    model: &'a Model,
    regime: Regime<'a>,
}

impl<'a> Responses<'a> {
    pub(crate) fn new(model: &'a Model, regime: Regime<'a>) -> Self {
        Self { model, regime }
    }

    /// Route costs per path at link flows `x` (negative flows read as zero).
    fn route_costs(&self, x: &[f64]) -> Vec<f64> {
        let b = &self.model.behavior;
        let link: Vec<f64> = x
            .iter()
            .enumerate()
            .map(|(a, &xa)| b.link_cost(self.regime, a, xa.max(0.0)))
            .collect();
        let routes = &self.model.routes;
        (0..routes.path_count())
            .map(|p| routes.route(p).links.iter().map(|&a| link[a]).sum())
            .collect()
    }

    fn utilities(&self, d: &[f64], h: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let b = &self.model.behavior;
        (0..d.len())
            .map(|s| b.destination_utilities(self.regime, s, d[s].max(0.0), h[s].max(0.0)))
            .unzip()
    }

    /// OD demands from the destination logit and path flows from the route
    /// logit applied to those new demands.
    fn travelers(&self, x: &[f64], d: &[f64], h: &[f64], od_out: &mut [f64], path_out: &mut [f64]) {
        let model = self.model;
        let routes = &model.routes;
        let alpha = model.logit.route();
        let costs = self.route_costs(x);
        let expected: Vec<f64> = (0..routes.od_count())
            .map(|od| logit::expected_time(&costs[routes.od_paths(od)], alpha))
            .collect();
        let (trip, _) = self.utilities(d, h);
        let nd = model.destination_count();
        for (r, origin) in model.network.origins().iter().enumerate() {
            let span = r * nd..(r + 1) * nd;
            logit::destination_choice(
                origin.demand,
                &expected[span.clone()],
                &trip,
                model.logit.destination(),
                &mut od_out[span],
            );
        }
        for od in 0..routes.od_count() {
            let span = routes.od_paths(od);
            logit::route_choice(od_out[od], &costs[span.clone()], alpha, &mut path_out[span]);
        }
    }

    fn firms(&self, d: &[f64], h: &[f64], out: &mut [f64]) {
        let (_, business) = self.utilities(d, h);
        logit::location_choice(
            &business,
            self.model.network.total_firms(),
            self.model.logit.location(),
            out,
        );
    }

    /// Reduced traveler map `(x, d) -> (x', d')` for fixed firms.
    fn traffic_map(&self, h: &[f64], z: &[f64], out: &mut [f64]) {
        let nl = self.model.link_count();
        let (x, d) = z.split_at(nl);
        let mut q = vec![0.0; self.model.routes.od_count()];
        let mut f = vec![0.0; self.model.routes.path_count()];
        self.travelers(x, d, h, &mut q, &mut f);
        self.aggregate(&f, &q, out);
    }

    fn aggregate(&self, f: &[f64], q: &[f64], out: &mut [f64]) {
        let routes = &self.model.routes;
        let nl = self.model.link_count();
        out.fill(0.0);
        for (p, &fp) in f.iter().enumerate() {
            for &a in &routes.route(p).links {
                out[a] += fp;
            }
        }
        for (od, &qv) in q.iter().enumerate() {
            out[nl + routes.od_pair(od).1] += qv;
        }
    }

    /// Reduced joint map `(x, d, h) -> (x', d', h')`.
    fn joint_map(&self, z: &[f64], out: &mut [f64]) {
        let nl = self.model.link_count();
        let nd = self.model.destination_count();
        let (xd, h) = z.split_at(nl + nd);
        self.traffic_map(h, xd, &mut out[..nl + nd]);
        self.firms(&xd[nl..], h, &mut out[nl + nd..]);
    }

    /// Full state from one traveler response at `(x, d, h)` and the given firms.
    fn traveler_state(&self, x: &[f64], d: &[f64], h: &[f64], firms: Vec<f64>) -> CombinedState {
        let mut q = vec![0.0; self.model.routes.od_count()];
        let mut f = vec![0.0; self.model.routes.path_count()];
        self.travelers(x, d, h, &mut q, &mut f);
        CombinedState::from_path_flows(&self.model.routes, f, firms).expect("dimensions fixed by the model")
    }

    /// Residuals of the three logit equalities at `state`.
    pub(crate) fn residuals(&self, state: &CombinedState) -> Residuals {
        let model = self.model;
        let routes = &model.routes;
        let mut q = vec![0.0; routes.od_count()];
        let mut f = vec![0.0; routes.path_count()];
        self.travelers(&state.link_flow, &state.dest_demand, &state.firms, &mut q, &mut f);
        // The route logit is applied to the state's own OD demands.
        let costs = self.route_costs(&state.link_flow);
        for od in 0..routes.od_count() {
            let span = routes.od_paths(od);
            logit::route_choice(state.od_demand[od], &costs[span.clone()], model.logit.route(), &mut f[span]);
        }
        let mut h = vec![0.0; model.destination_count()];
        self.firms(&state.dest_demand, &state.firms, &mut h);
        Residuals {
            route: sup_distance(&f, &state.path_flow),
            destination: sup_distance(&q, &state.od_demand),
            location: sup_distance(&h, &state.firms),
        }
    }

    /// Coefficients of the linearized VI: per path
    /// `(1/alpha) ln f + route cost + (1/gamma - 1/alpha) ln q - A`, and per
    /// destination `(1/beta) ln h - B`.
    fn vi_coefficients(&self, state: &CombinedState, floor: f64) -> (Vec<f64>, Vec<f64>) {
        let model = self.model;
        let routes = &model.routes;
        let logit = &model.logit;
        let costs = self.route_costs(&state.link_flow);
        let (trip, business) = self.utilities(&state.dest_demand, &state.firms);
        let path = (0..routes.path_count())
            .map(|p| {
                let od = routes.path_od(p);
                ln(state.path_flow[p].max(floor)) / logit.route()
                    + costs[p]
                    + logit.nest_weight() * ln(state.od_demand[od].max(floor))
                    - trip[routes.od_pair(od).1]
            })
            .collect();
        let dest = business
            .iter()
            .zip(&state.firms)
            .map(|(&b, &h)| ln(h.max(floor)) / logit.location() - b)
            .collect();
        (path, dest)
    }
}

/// Gap of the traveler block: `sum_r sum_k f_k (coef_k - min_{k in r} coef)`.
fn traffic_gap(model: &Model, coef: &[f64], state: &CombinedState) -> f64 {
    let routes = &model.routes;
    let nd = model.destination_count();
    let mut gap = 0.0;
    for r in 0..model.origin_count() {
        let paths = routes.od_paths(r * nd).start..routes.od_paths(r * nd + nd - 1).end;
        let best = coef[paths.clone()].iter().copied().fold(f64::INFINITY, f64::min);
        gap += paths.map(|p| state.path_flow[p] * (coef[p] - best)).sum::<f64>();
    }
    gap
}

fn location_gap(coef: &[f64], firms: &[f64]) -> f64 {
    let best = coef.iter().copied().fold(f64::INFINITY, f64::min);
    firms.iter().zip(coef).map(|(h, c)| h * (c - best)).sum()
}

fn feasibility(model: &Model, state: &CombinedState) -> Result<()> {
    let tol = 1e-8 * state.scale().max(1.0);
    let check = validate_state(state, &model.network, &model.routes, tol);
    if check.is_valid() {
        Ok(())
    } else {
        Err(Error::InfeasibleState {
            residual: check.worst(),
        })
    }
}

/// Gap function of the joint variational inequality under `regime`:
/// `max over feasible z' of Psi(z)^T (z - z')`.
///
/// The maximization splits into one linear program per origin (all trips of
/// the origin on its best path) and one over the firm simplex, so the value
/// is exact. It is zero exactly at an equilibrium.
pub fn vi_gap(model: &Model, regime: Regime<'_>, state: &CombinedState, floor: f64) -> Result<f64> {
    feasibility(model, state)?;
    let (path, dest) = Responses::new(model, regime).vi_coefficients(state, floor);
    Ok(traffic_gap(model, &path, state) + location_gap(&dest, &state.firms))
}

/// Logit residuals of `state` under `regime`.
pub fn fixed_point_residuals(model: &Model, regime: Regime<'_>, state: &CombinedState) -> Residuals {
    Responses::new(model, regime).residuals(state)
}

/// Uniform shares: each origin splits evenly over destinations and each OD
/// demand evenly over its routes; firms split evenly.
pub fn uniform_start(model: &Model) -> CombinedState {
    let nd = model.destination_count();
    let routes = &model.routes;
    let mut f = vec![0.0; routes.path_count()];
    for (r, o) in model.network.origins().iter().enumerate() {
        for s in 0..nd {
            let span = routes.od_paths(r * nd + s);
            let share = o.demand / nd as f64 / span.len() as f64;
            f[span].fill(share);
        }
    }
    let h = vec![model.network.total_firms() / nd as f64; nd];
    CombinedState::from_path_flows(routes, f, h).expect("dimensions fixed by the model")
}

/// Feasible state with random strictly positive shares.
pub fn random_start(model: &Model, seed: u64) -> CombinedState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nd = model.destination_count();
    let routes = &model.routes;
    let mut weights = |n: usize| -> Vec<f64> {
        let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
        let sum: f64 = w.iter().sum();
        w.into_iter().map(|v| v / sum).collect()
    };
    let mut f = vec![0.0; routes.path_count()];
    for (r, o) in model.network.origins().iter().enumerate() {
        let dest = weights(nd);
        for (s, share) in dest.into_iter().enumerate() {
            let span = routes.od_paths(r * nd + s);
            let split = weights(span.len());
            for (p, w) in span.zip(split) {
                f[p] = o.demand * share * w;
            }
        }
    }
    let h = weights(nd)
        .into_iter()
        .map(|w| w * model.network.total_firms())
        .collect();
    CombinedState::from_path_flows(routes, f, h).expect("dimensions fixed by the model")
}

/// Equilibrium solver for one model under one regime.
pub struct Solver<'a> {
    model: &'a Model,
    regime: Regime<'a>,
    config: EquilibriumConfig,
}

impl<'a> Solver<'a> {
    pub fn new(model: &'a Model, regime: Regime<'a>, config: EquilibriumConfig) -> Result<Self> {
        config.validate()?;
        if let Regime::Priced(c) = regime {
            model.check_len("link tolls", model.link_count(), c.link_toll.len())?;
            model.check_len("entrance fees", model.destination_count(), c.entrance_fee.len())?;
            model.check_len("business taxes", model.destination_count(), c.business_tax.len())?;
        }
        Ok(Self { model, regime, config })
    }

    fn responses(&self) -> Responses<'a> {
        Responses::new(self.model, self.regime)
    }

    fn traffic_point(&self, firms: &[f64], start: &CombinedState) -> Result<(Vec<f64>, usize, Vec<f64>)> {
        let resp = self.responses();
        let z0 = [start.link_flow.as_slice(), start.dest_demand.as_slice()].concat();
        let out = fixed_point::solve(|z, g| resp.traffic_map(firms, z, g), z0, &self.config.inner())?;
        Ok((out.z, out.iterations, out.trace))
    }

    fn location_point(&self, demand: &[f64], start: &[f64]) -> Result<(Vec<f64>, usize, Vec<f64>)> {
        let resp = self.responses();
        let out = fixed_point::solve(
            |h, g| resp.firms(demand, h, g),
            start.to_vec(),
            &self.config.inner(),
        )?;
        Ok((out.z, out.iterations, out.trace))
    }

    /// Traveler equilibrium for fixed firms.
    pub fn traffic(&self, firms: &[f64], start: Option<&CombinedState>) -> Result<(CombinedState, GapReport)> {
        let model = self.model;
        model.check_len("firm distribution", model.destination_count(), firms.len())?;
        let default;
        let start = match start {
            Some(s) => s,
            None => {
                default = uniform_start(model);
                &default
            }
        };
        let (z, iterations, trace) = self.traffic_point(firms, start)?;
        let resp = self.responses();
        let nl = model.link_count();
        let state = resp.traveler_state(&z[..nl], &z[nl..], firms, firms.to_vec());
        let res = resp.residuals(&state);
        let (coef, _) = resp.vi_coefficients(&state, self.config.flow_floor);
        let report = GapReport {
            vi_gap: traffic_gap(model, &coef, &state),
            route_residual: Some(res.route),
            destination_residual: Some(res.destination),
            location_residual: None,
            iterations,
            converged: true,
            trace,
        };
        Ok((state, report))
    }

    /// Firm equilibrium for fixed destination demands.
    pub fn location(&self, demand: &[f64], start: Option<&[f64]>) -> Result<(Vec<f64>, GapReport)> {
        let model = self.model;
        let nd = model.destination_count();
        model.check_len("destination demand", nd, demand.len())?;
        let uniform = vec![model.network.total_firms() / nd as f64; nd];
        let (h, iterations, trace) = self.location_point(demand, start.unwrap_or(&uniform))?;
        let resp = self.responses();
        let mut firms = vec![0.0; nd];
        resp.firms(demand, &h, &mut firms);
        let mut again = vec![0.0; nd];
        resp.firms(demand, &firms, &mut again);
        let (_, business) = resp.utilities(demand, &firms);
        let coef: Vec<f64> = business
            .iter()
            .zip(&firms)
            .map(|(&b, &hs)| ln(hs.max(self.config.flow_floor)) / model.logit.location() - b)
            .collect();
        let report = GapReport {
            vi_gap: location_gap(&coef, &firms),
            route_residual: None,
            destination_residual: None,
            location_residual: Some(sup_distance(&again, &firms)),
            iterations,
            converged: true,
            trace,
        };
        Ok((firms, report))
    }

    /// Joint equilibrium: alternating traffic and location solves with
    /// averaging of the firm distribution, then a joint solve on `(x, d, h)`.
    pub fn combined(&self, start: Option<&CombinedState>) -> Result<(CombinedState, GapReport)> {
        let model = self.model;
        let nl = model.link_count();
        let nd = model.destination_count();
        let resp = self.responses();
        let mut state = match start {
            Some(s) => {
                let check = validate_state(s, &model.network, &model.routes, 1e-6 * s.scale().max(1.0));
                if !check.is_valid() {
                    return Err(Error::InfeasibleState { residual: check.worst() });
                }
                s.clone()
            }
            None => uniform_start(model),
        };
        let mut trace = Vec::new();
        let mut iterations = 0;
        let joint_residual = |x: &[f64], d: &[f64], h: &[f64]| {
            let z = [x, d, h].concat();
            let mut g = vec![0.0; z.len()];
            resp.joint_map(&z, &mut g);
            sup_distance(&z, &g) / sup_norm(&z).max(1.0)
        };

        for sweep in 1..=self.config.diagonalization_sweeps {
            if joint_residual(&state.link_flow, &state.dest_demand, &state.firms) < self.config.switch_tolerance {
                break;
            }
            let (z, it, tr) = self.traffic_point(&state.firms, &state)?;
            iterations += it;
            trace.extend(tr);
            let (target, it, tr) = self.location_point(&z[nl..], &state.firms)?;
            iterations += it;
            trace.extend(tr);
            let step = self.config.damping.step(sweep);
            let firms: Vec<f64> = state
                .firms
                .iter()
                .zip(&target)
                .map(|(h, t)| h + step * (t - h))
                .collect();
            state.link_flow = z[..nl].to_vec();
            state.dest_demand = z[nl..].to_vec();
            state.firms = firms;
        }

        let z0 = [
            state.link_flow.as_slice(),
            state.dest_demand.as_slice(),
            state.firms.as_slice(),
        ]
        .concat();
        let out = fixed_point::solve(|z, g| resp.joint_map(z, g), z0, &self.config.inner()).map_err(|e| match e {
            Error::NotConverged {
                iterations: it,
                residual,
                trace: tr,
            } => Error::NotConverged {
                iterations: iterations + it,
                residual,
                trace: [trace.clone(), tr].concat(),
            },
            other => other,
        })?;
        iterations += out.iterations;
        trace.extend(out.trace);

        let z = out.z;
        let (x, rest) = z.split_at(nl);
        let (d, h) = rest.split_at(nd);
        let mut firms = vec![0.0; nd];
        resp.firms(d, h, &mut firms);
        let state = resp.traveler_state(x, d, h, firms);
        let report = self.report(&state, iterations, trace);
        Ok((state, report))
    }

    fn report(&self, state: &CombinedState, iterations: usize, trace: Vec<f64>) -> GapReport {
        let resp = self.responses();
        let res = resp.residuals(state);
        let (path, dest) = resp.vi_coefficients(state, self.config.flow_floor);
        GapReport {
            vi_gap: traffic_gap(self.model, &path, state) + location_gap(&dest, &state.firms),
            route_residual: Some(res.route),
            destination_residual: Some(res.destination),
            location_residual: Some(res.location),
            iterations,
            converged: true,
            trace,
        }
    }
}

/// Traveler equilibrium for a fixed firm distribution, actual costs.
pub fn solve_parametric_traffic(
    model: &Model,
    firms: &[f64],
    config: &EquilibriumConfig,
) -> Result<(CombinedState, GapReport)> {
    Solver::new(model, Regime::Untolled, config.clone())?.traffic(firms, None)
}

/// Firm equilibrium for fixed destination demands, actual attractions.
pub fn solve_parametric_location(
    model: &Model,
    demand: &[f64],
    config: &EquilibriumConfig,
) -> Result<(Vec<f64>, GapReport)> {
    Solver::new(model, Regime::Untolled, config.clone())?.location(demand, None)
}

/// Untolled combined equilibrium from the uniform start.
pub fn solve_combined(model: &Model, config: &EquilibriumConfig) -> Result<(CombinedState, GapReport)> {
    solve_combined_from(model, Regime::Untolled, None, config)
}

/// Combined equilibrium under `regime` from an optional feasible start.
pub fn solve_combined_from(
    model: &Model,
    regime: Regime<'_>,
    start: Option<&CombinedState>,
    config: &EquilibriumConfig,
) -> Result<(CombinedState, GapReport)> {
    Solver::new(model, regime, config.clone())?.combined(start)
}

/// One solve from the uniform start plus `starts - 1` seeded random starts.
pub fn multistart(
    model: &Model,
    regime: Regime<'_>,
    starts: usize,
    seed: u64,
    config: &EquilibriumConfig,
) -> Result<Vec<Result<(CombinedState, GapReport)>>> {
    let solver = Solver::new(model, regime, config.clone())?;
    Ok((0..starts.max(1))
        .map(|i| {
            let start = if i == 0 {
                uniform_start(model)
            } else {
                random_start(model, seed.wrapping_add(i as u64))
            };
            solver.combined(Some(&start))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn damping_schedules() {
        assert_eq!(Damping::Msa.step(1), 1.0);
        assert_eq!(Damping::Msa.step(4), 0.25);
        assert_eq!(Damping::Fixed(0.3).step(9), 0.3);
        let bad = EquilibriumConfig {
            damping: Damping::Fixed(1.5),
            ..Default::default()
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn starts_are_feasible() {
        let model = fixtures::tiny();
        for state in [uniform_start(&model), random_start(&model, 7)] {
            assert!(validate_state(&state, &model.network, &model.routes, 1e-12).is_valid());
        }
        assert_eq!(random_start(&model, 3), random_start(&model, 3));
        assert_ne!(random_start(&model, 3), random_start(&model, 4));
    }

    #[test]
    fn gap_rejects_infeasible_state() {
        let model = fixtures::tiny();
        let mut state = uniform_start(&model);
        state.firms[0] += 1.0;
        assert!(matches!(
            vi_gap(&model, Regime::Untolled, &state, 1e-12),
            Err(Error::InfeasibleState { .. })
        ));
    }

    #[test]
    fn symmetric_parametric_traffic() {
        let model = fixtures::symmetric();
        let (state, report) = solve_parametric_traffic(&model, &[2.0, 2.0], &EquilibriumConfig::default()).unwrap();
        assert!((state.od_demand[0] - 5.0).abs() < 1e-10);
        assert!((state.od_demand[1] - 5.0).abs() < 1e-10);
        assert!((state.path_flow[0] - state.path_flow[1]).abs() < 1e-10);
        assert!(report.max_residual() < 1e-10);
        assert!(report.vi_gap.abs() < 1e-9);
    }

    #[test]
    fn symmetric_location() {
        let model = fixtures::symmetric();
        let (h, report) = solve_parametric_location(&model, &[5.0, 5.0], &EquilibriumConfig::default()).unwrap();
        let t = model.network.total_firms();
        assert!((h[0] - t / 2.0).abs() < 1e-12 && (h[1] - t / 2.0).abs() < 1e-12);
        assert!(report.location_residual.unwrap() < 1e-12);
    }

    #[test]
    fn perturbed_equilibrium_has_positive_gap() {
        let model = fixtures::tiny();
        let config = EquilibriumConfig::default();
        let (mut state, report) = solve_combined(&model, &config).unwrap();
        assert!(report.vi_gap < 1e-8);
        let moved = 0.1 * state.firms[0];
        state.firms[0] -= moved;
        state.firms[1] += moved;
        assert!(vi_gap(&model, Regime::Untolled, &state, config.flow_floor).unwrap() > 1e-6);
    }
}
