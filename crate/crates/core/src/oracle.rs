//! Brute-force references for tiny instances.
//!
//! Nothing here calls the solver's logit maps or aggregation helpers: costs,
//! choice probabilities and objectives are summed directly so that
//! agreement with the solvers is an independent check.
//!
//! Grids parameterize only free coordinates: with two destinations each
//! origin has one destination share, each OD pair with two routes has one
//! route share, and the firm split is one more share. Shares run over
//! `i / (resolution - 1)` for `i = 0..resolution`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::math::{exp, ln};
use crate::{CombinedState, Error, Model, Regime, Result};

pub const MAX_ORIGINS: usize = 2;
pub const MAX_DESTINATIONS: usize = 2;
pub const MAX_ROUTES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Points per free coordinate, endpoints included.
    pub resolution: usize,
    pub max_points: u64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            resolution: 200,
            max_points: 10_000_000,
        }
    }
}

impl GridSpec {
    /// Width of one cell in share units.
    pub fn cell(&self) -> f64 {
        1.0 / (self.resolution - 1) as f64
    }
}

/// Objective of a system-optimum problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    /// Traveler social cost with the firm distribution held fixed.
    Travelers { firms: Vec<f64> },
    /// Social cost of travelers and firms.
    Overall,
}

/// Sup-norm deviation from each block of logit equalities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KktResidual {
    pub route: f64,
    pub destination: f64,
    pub location: f64,
}

impl KktResidual {
    pub fn max(&self) -> f64 {
        self.route.max(self.destination).max(self.location)
    }
}

/// Adjusted link cost, traveler utility and firm utility written out from
/// the primitive partials.
fn link_cost(model: &Model, regime: Regime<'_>, a: usize, x: f64) -> f64 {
    let l = &model.behavior.links[a];
    let t = l.time(x);
    match regime {
        Regime::Untolled => t,
        Regime::RoadPricing | Regime::SystemOptimum => t + x * l.derivative(x),
        Regime::Priced(c) => t + c.link_toll[a],
    }
}

fn utilities(model: &Model, regime: Regime<'_>, s: usize, d: f64, h: f64) -> (f64, f64) {
    let v = model.behavior.destinations[s].eval(d, h);
    match regime {
        Regime::Untolled => (v.trip, v.business),
        Regime::RoadPricing => (v.trip + d * v.trip_dd, v.business),
        Regime::SystemOptimum => (
            v.trip + d * v.trip_dd + h * v.business_dd,
            v.business + d * v.trip_dh + h * v.business_dh,
        ),
        Regime::Priced(c) => (v.trip - c.entrance_fee[s], v.business - c.business_tax[s]),
    }
}

/// Reusable buffers for residual and objective evaluation.
struct Scratch {
    link_flow: Vec<f64>,
    link_cost: Vec<f64>,
    route_cost: Vec<f64>,
    od: Vec<f64>,
    dest: Vec<f64>,
    expected: Vec<f64>,
    trip: Vec<f64>,
    business: Vec<f64>,
}

impl Scratch {
    fn new(model: &Model) -> Self {
        let nd = model.destination_count();
        Self {
            link_flow: vec![0.0; model.link_count()],
            link_cost: vec![0.0; model.link_count()],
            route_cost: vec![0.0; model.routes.path_count()],
            od: vec![0.0; model.routes.od_count()],
            dest: vec![0.0; nd],
            expected: vec![0.0; model.routes.od_count()],
            trip: vec![0.0; nd],
            business: vec![0.0; nd],
        }
    }

    /// Aggregates path flows into link, OD and destination totals.
    fn sum_flows(&mut self, model: &Model, path_flow: &[f64]) {
        let routes = &model.routes;
        self.link_flow.fill(0.0);
        self.od.fill(0.0);
        self.dest.fill(0.0);
        for p in 0..routes.path_count() {
            for &a in &routes.route(p).links {
                self.link_flow[a] += path_flow[p];
            }
            let od = routes.path_od(p);
            self.od[od] += path_flow[p];
            self.dest[routes.od_pair(od).1] += path_flow[p];
        }
    }

    fn residual(&mut self, model: &Model, regime: Regime<'_>, path_flow: &[f64], firms: &[f64]) -> KktResidual {
        self.sum_flows(model, path_flow);
        let routes = &model.routes;
        let alpha = model.logit.route();
        let gamma = model.logit.destination();
        let beta = model.logit.location();
        let nd = model.destination_count();
        for a in 0..model.link_count() {
            self.link_cost[a] = link_cost(model, regime, a, self.link_flow[a]);
        }
        for p in 0..routes.path_count() {
            self.route_cost[p] = routes.route(p).links.iter().map(|&a| self.link_cost[a]).sum();
        }
        for s in 0..nd {
            let (u, b) = utilities(model, regime, s, self.dest[s], firms[s]);
            self.trip[s] = u;
            self.business[s] = b;
        }
        let mut route_res = 0.0_f64;
        for od in 0..routes.od_count() {
            let span = routes.od_paths(od);
            let cheapest = self.route_cost[span.clone()].iter().copied().fold(f64::INFINITY, f64::min);
            let mut total = 0.0;
            for p in span.clone() {
                total += exp(-alpha * (self.route_cost[p] - cheapest));
            }
            self.expected[od] = cheapest - ln(total) / alpha;
            for p in span {
                let share = exp(-alpha * (self.route_cost[p] - cheapest)) / total;
                route_res = route_res.max((path_flow[p] - self.od[od] * share).abs());
            }
        }
        let mut dest_res = 0.0_f64;
        for (r, origin) in model.network.origins().iter().enumerate() {
            let mut best = f64::NEG_INFINITY;
            for s in 0..nd {
                best = best.max(-gamma * (self.expected[r * nd + s] - self.trip[s]));
            }
            let mut total = 0.0;
            for s in 0..nd {
                total += exp(-gamma * (self.expected[r * nd + s] - self.trip[s]) - best);
            }
            for s in 0..nd {
                let share = exp(-gamma * (self.expected[r * nd + s] - self.trip[s]) - best) / total;
                dest_res = dest_res.max((self.od[r * nd + s] - origin.demand * share).abs());
            }
        }
        let best = self.business.iter().fold(f64::NEG_INFINITY, |m, &b| m.max(beta * b));
        let total: f64 = self.business.iter().map(|&b| exp(beta * b - best)).sum();
        let mut loc_res = 0.0_f64;
        for s in 0..nd {
            let share = exp(beta * self.business[s] - best) / total;
            loc_res = loc_res.max((firms[s] - model.network.total_firms() * share).abs());
        }
        KktResidual {
            route: route_res,
            destination: dest_res,
            location: loc_res,
        }
    }

    fn objective(&mut self, model: &Model, objective: &Objective, path_flow: &[f64], firms: &[f64]) -> f64 {
        self.sum_flows(model, path_flow);
        let xlnx = |v: f64| if v > 0.0 { v * (ln(v) - 1.0) } else { 0.0 };
        let logit = &model.logit;
        let mut value = 0.0;
        for &f in path_flow {
            value += xlnx(f) / logit.route();
        }
        let weight = 1.0 / logit.destination() - 1.0 / logit.route();
        for &q in &self.od {
            value += weight * xlnx(q);
        }
        for (a, l) in model.behavior.links.iter().enumerate() {
            let x = self.link_flow[a];
            value += x * (l.free_flow + l.coefficient * libm::pow(x, l.power));
        }
        let fixed;
        let h: &[f64] = match objective {
            Objective::Travelers { firms } => {
                fixed = firms;
                fixed
            }
            Objective::Overall => firms,
        };
        for s in 0..model.destination_count() {
            let v = model.behavior.destinations[s].eval(self.dest[s], h[s]);
            value -= v.trip * self.dest[s];
            if matches!(objective, Objective::Overall) {
                value += xlnx(h[s]) / logit.location() - v.business * h[s];
            }
        }
        value
    }
}

/// Deviation of `state` from the logit equalities of `regime`.
pub fn kkt_residual(model: &Model, regime: Regime<'_>, state: &CombinedState) -> KktResidual {
    Scratch::new(model).residual(model, regime, &state.path_flow, &state.firms)
}

/// Objective value summed directly from path flows and firms.
pub fn objective_value(model: &Model, objective: &Objective, state: &CombinedState) -> f64 {
    Scratch::new(model).objective(model, objective, &state.path_flow, &state.firms)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Coord {
    /// Share of origin `r` going to the first destination.
    Destination(usize),
    /// Share of OD pair `od` on its first route.
    Route(usize),
    Firms,
}

struct Layout {
    coords: Vec<Coord>,
    resolution: usize,
}

impl Layout {
    fn new(model: &Model, grid: &GridSpec, with_firms: bool) -> Result<Self> {
        let routes = &model.routes;
        let too_large = |why: alloc::string::String| Err(Error::InstanceTooLarge(why));
        if model.origin_count() > MAX_ORIGINS {
            return too_large(format!("{} origins (at most {MAX_ORIGINS})", model.origin_count()));
        }
        if model.destination_count() > MAX_DESTINATIONS {
            return too_large(format!(
                "{} destinations (at most {MAX_DESTINATIONS})",
                model.destination_count()
            ));
        }
        if routes.path_count() > MAX_ROUTES {
            return too_large(format!("{} routes (at most {MAX_ROUTES})", routes.path_count()));
        }
        if grid.resolution < 2 {
            return too_large("resolution must be at least 2".into());
        }
        let nd = model.destination_count();
        let mut coords = Vec::new();
        if nd == 2 {
            coords.extend((0..model.origin_count()).map(Coord::Destination));
        }
        for od in 0..routes.od_count() {
            match routes.od_paths(od).len() {
                1 => {}
                2 => coords.push(Coord::Route(od)),
                n => return too_large(format!("OD pair {od} has {n} routes (at most 2)")),
            }
        }
        if with_firms && nd == 2 {
            coords.push(Coord::Firms);
        }
        let points = libm::pow(grid.resolution as f64, coords.len() as f64);
        if points > grid.max_points as f64 {
            return too_large(format!("{points} grid points (at most {})", grid.max_points));
        }
        Ok(Self {
            coords,
            resolution: grid.resolution,
        })
    }

    fn share(&self, index: usize) -> f64 {
        index as f64 / (self.resolution - 1) as f64
    }

    /// Path flows and firms at the grid point `idx`.
    fn fill(&self, model: &Model, idx: &[usize], fixed_firms: Option<&[f64]>, f: &mut [f64], h: &mut [f64]) {
        let routes = &model.routes;
        let nd = model.destination_count();
        let mut dest_share = vec![1.0; model.origin_count()];
        let mut route_share = vec![1.0; routes.od_count()];
        let mut firm_share = 1.0;
        for (c, &i) in self.coords.iter().zip(idx) {
            match *c {
                Coord::Destination(r) => dest_share[r] = self.share(i),
                Coord::Route(od) => route_share[od] = self.share(i),
                Coord::Firms => firm_share = self.share(i),
            }
        }
        for (r, origin) in model.network.origins().iter().enumerate() {
            for s in 0..nd {
                let q = if nd == 1 {
                    origin.demand
                } else if s == 0 {
                    origin.demand * dest_share[r]
                } else {
                    origin.demand * (1.0 - dest_share[r])
                };
                let od = r * nd + s;
                let span = routes.od_paths(od);
                if span.len() == 1 {
                    f[span.start] = q;
                } else {
                    f[span.start] = q * route_share[od];
                    f[span.start + 1] = q * (1.0 - route_share[od]);
                }
            }
        }
        match fixed_firms {
            Some(fixed) => h.copy_from_slice(fixed),
            None => {
                let t = model.network.total_firms();
                if nd == 1 {
                    h[0] = t;
                } else {
                    h[0] = t * firm_share;
                    h[1] = t * (1.0 - firm_share);
                }
            }
        }
    }

    /// Calls `visit` with every grid index in lexicographic order.
    fn for_each(&self, mut visit: impl FnMut(&[usize])) {
        let mut idx = vec![0usize; self.coords.len()];
        loop {
            visit(&idx);
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.resolution {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
}

/// Share coordinates of a state, in the grid's coordinate order.
pub fn share_coordinates(model: &Model, state: &CombinedState, with_firms: bool) -> Vec<f64> {
    let routes = &model.routes;
    let nd = model.destination_count();
    let mut out = Vec::new();
    if nd == 2 {
        for (r, origin) in model.network.origins().iter().enumerate() {
            out.push(state.od_demand[r * nd] / origin.demand);
        }
    }
    for od in 0..routes.od_count() {
        let span = routes.od_paths(od);
        if span.len() == 2 {
            out.push(state.path_flow[span.start] / state.od_demand[od]);
        }
    }
    if with_firms && nd == 2 {
        out.push(state.firms[0] / model.network.total_firms());
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridEquilibrium {
    pub state: CombinedState,
    /// Share coordinates of the best point.
    pub coordinates: Vec<f64>,
    /// Largest logit residual at the best point.
    pub residual: f64,
    pub points: u64,
}

/// Grid point minimizing the untolled logit residual.
pub fn grid_equilibrium(model: &Model, grid: &GridSpec) -> Result<GridEquilibrium> {
    let layout = Layout::new(model, grid, true)?;
    let mut scratch = Scratch::new(model);
    let mut f = vec![0.0; model.routes.path_count()];
    let mut h = vec![0.0; model.destination_count()];
    let mut best = (f64::INFINITY, Vec::new());
    let mut points = 0u64;
    layout.for_each(|idx| {
        points += 1;
        layout.fill(model, idx, None, &mut f, &mut h);
        let r = scratch.residual(model, Regime::Untolled, &f, &h).max();
        if r < best.0 {
            best = (r, idx.to_vec());
        }
    });
    layout.fill(model, &best.1, None, &mut f, &mut h);
    let state = CombinedState::from_path_flows(&model.routes, f, h)?;
    Ok(GridEquilibrium {
        coordinates: best.1.iter().map(|&i| layout.share(i)).collect(),
        state,
        residual: best.0,
        points,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub state: CombinedState,
    pub coordinates: Vec<f64>,
    pub value: f64,
    /// Largest objective change to a neighboring grid point, summed over
    /// coordinates: a one-cell Lipschitz allowance around the minimum.
    pub slack: f64,
    pub points: u64,
}

/// Exhaustive minimization of `objective` over the grid.
pub fn grid_optimum(model: &Model, grid: &GridSpec, objective: &Objective) -> Result<GridOptimum> {
    let fixed = match objective {
        Objective::Travelers { firms } => {
            model.check_len("firm distribution", model.destination_count(), firms.len())?;
            Some(firms.as_slice())
        }
        Objective::Overall => None,
    };
    let layout = Layout::new(model, grid, fixed.is_none())?;
    let mut scratch = Scratch::new(model);
    let mut f = vec![0.0; model.routes.path_count()];
    let mut h = vec![0.0; model.destination_count()];
    let mut best = (f64::INFINITY, Vec::new());
    let mut points = 0u64;
    layout.for_each(|idx| {
        points += 1;
        layout.fill(model, idx, fixed, &mut f, &mut h);
        let v = scratch.objective(model, objective, &f, &h);
        if v < best.0 {
            best = (v, idx.to_vec());
        }
    });
    let mut slack = 0.0;
    for k in 0..layout.coords.len() {
        let mut worst = 0.0_f64;
        for delta in [-1_isize, 1] {
            let i = best.1[k] as isize + delta;
            if i < 0 || i >= layout.resolution as isize {
                continue;
            }
            let mut idx = best.1.clone();
            idx[k] = i as usize;
            layout.fill(model, &idx, fixed, &mut f, &mut h);
            worst = worst.max((scratch.objective(model, objective, &f, &h) - best.0).abs());
        }
        slack += worst;
    }
    layout.fill(model, &best.1, fixed, &mut f, &mut h);
    let state = CombinedState::from_path_flows(&model.routes, f, h)?;
    Ok(GridOptimum {
        coordinates: best.1.iter().map(|&i| layout.share(i)).collect(),
        state,
        value: best.0,
        slack,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectOptions {
    pub max_iterations: usize,
    /// Stop once, within every origin and across destinations for firms,
    /// the spread of partial derivatives falls below this.
    pub stationarity: f64,
}

impl Default for DirectOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50_000,
            stationarity: 1e-9,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectResult {
    pub state: CombinedState,
    pub value: f64,
    pub iterations: usize,
    pub stationarity: f64,
}

/// Partial derivatives of the objective with respect to path flows and firms.
fn gradient(
    model: &Model,
    objective: &Objective,
    scratch: &mut Scratch,
    f: &[f64],
    h: &[f64],
    grad_f: &mut [f64],
    grad_h: &mut [f64],
) {
    scratch.sum_flows(model, f);
    let routes = &model.routes;
    let logit = &model.logit;
    let weight = 1.0 / logit.destination() - 1.0 / logit.route();
    for (a, l) in model.behavior.links.iter().enumerate() {
        let x = scratch.link_flow[a];
        scratch.link_cost[a] = l.time(x) + x * l.derivative(x);
    }
    let overall = matches!(objective, Objective::Overall);
    for s in 0..model.destination_count() {
        let (d, hs) = (scratch.dest[s], h[s]);
        let v = model.behavior.destinations[s].eval(d, hs);
        scratch.trip[s] = v.trip + d * v.trip_dd + if overall { hs * v.business_dd } else { 0.0 };
        scratch.business[s] = v.business + d * v.trip_dh + hs * v.business_dh;
    }
    let tiny = 1e-300;
    for p in 0..routes.path_count() {
        let od = routes.path_od(p);
        let cost: f64 = routes.route(p).links.iter().map(|&a| scratch.link_cost[a]).sum();
        grad_f[p] = ln(f[p].max(tiny)) / logit.route() + cost + weight * ln(scratch.od[od].max(tiny))
            - scratch.trip[routes.od_pair(od).1];
    }
    for s in 0..h.len() {
        grad_h[s] = if overall {
            ln(h[s].max(tiny)) / logit.location() - scratch.business[s]
        } else {
            0.0
        };
    }
}

/// Multiplicative (entropic mirror) gradient step on a scaled simplex.
fn mirror_step(values: &[f64], grad: &[f64], step: f64, total: f64, out: &mut [f64]) {
    let low = grad.iter().copied().fold(f64::INFINITY, f64::min);
    let mut sum = 0.0;
    for i in 0..values.len() {
        out[i] = values[i] * exp(-step * (grad[i] - low));
        sum += out[i];
    }
    for o in out.iter_mut() {
        *o *= total / sum;
    }
}

fn spread(grad: &[f64]) -> f64 {
    let hi = grad.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = grad.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Direct minimization by exponentiated-gradient steps (projected gradient
/// in the entropy geometry of the simplices) with backtracking.
pub fn minimize_direct(model: &Model, objective: &Objective, start: &CombinedState, opts: &DirectOptions) -> DirectResult {
    let routes = &model.routes;
    let nd = model.destination_count();
    let mut scratch = Scratch::new(model);
    let mut f = start.path_flow.clone();
    let mut h = match objective {
        Objective::Travelers { firms } => firms.clone(),
        Objective::Overall => start.firms.clone(),
    };
    let overall = matches!(objective, Objective::Overall);
    let mut grad_f = vec![0.0; f.len()];
    let mut grad_h = vec![0.0; h.len()];
    let mut next_f = f.clone();
    let mut next_h = h.clone();
    let mut value = scratch.objective(model, objective, &f, &h);
    let mut step = 0.5 * model.logit.destination().min(model.logit.location());
    let mut iterations = 0;
    let mut stationarity = f64::INFINITY;
    let origin_paths = |r: usize| routes.od_paths(r * nd).start..routes.od_paths(r * nd + nd - 1).end;

    while iterations < opts.max_iterations {
        gradient(model, objective, &mut scratch, &f, &h, &mut grad_f, &mut grad_h);
        stationarity = (0..model.origin_count())
            .map(|r| spread(&grad_f[origin_paths(r)]))
            .fold(if overall { spread(&grad_h) } else { 0.0 }, f64::max);
        if stationarity < opts.stationarity {
            break;
        }
        iterations += 1;
        let mut accepted = false;
        for _ in 0..60 {
            for (r, origin) in model.network.origins().iter().enumerate() {
                let span = origin_paths(r);
                mirror_step(&f[span.clone()], &grad_f[span.clone()], step, origin.demand, &mut next_f[span]);
            }
            if overall {
                mirror_step(&h, &grad_h, step, model.network.total_firms(), &mut next_h);
            }
            let candidate = scratch.objective(model, objective, &next_f, &next_h);
            if candidate <= value {
                value = candidate;
                core::mem::swap(&mut f, &mut next_f);
                core::mem::swap(&mut h, &mut next_h);
                accepted = true;
                step *= 1.25;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let state = CombinedState::from_path_flows(routes, f, h).expect("dimensions fixed by the model");
    DirectResult {
        state,
        value,
        iterations,
        stationarity,
    }
}
