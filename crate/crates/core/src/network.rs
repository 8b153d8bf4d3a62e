//! Road network topology, origin demands and the feasible flow sets.
//!
//! Links, origins and destinations keep the order they were given in; every
//! per-link, per-origin and per-destination vector in the crate is indexed
//! in that order. Origin-destination pairs are indexed origin-major:
//! `od = r * destinations + s`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Range;

use crate::math::{sup_distance, sup_norm};
use crate::{Error, Result};

/// External node label as it appears in input files.
pub type NodeId = u32;

/// Per OD pair cap used when callers have no better bound.
pub const DEFAULT_MAX_ROUTES: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Link {
    pub tail: NodeId,
    pub head: NodeId,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Origin {
    pub node: NodeId,
    /// Fixed trip production (trips/period).
    pub demand: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    nodes: Vec<NodeId>,
    links: Vec<Link>,
    origins: Vec<Origin>,
    destinations: Vec<NodeId>,
    total_firms: f64,
}

impl Network {
    pub fn new(
        nodes: Vec<NodeId>,
        links: Vec<Link>,
        origins: Vec<Origin>,
        destinations: Vec<NodeId>,
        total_firms: f64,
    ) -> Result<Self> {
        let invalid = |msg: alloc::string::String| Err(Error::InvalidNetwork(msg));
        let mut sorted = nodes.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate node".into());
        }
        let known = |n: NodeId| sorted.binary_search(&n).is_ok();
        for (a, link) in links.iter().enumerate() {
            if !known(link.tail) || !known(link.head) {
                return invalid(format!("link {a} ({}->{}) uses an unknown node", link.tail, link.head));
            }
            if link.tail == link.head {
                return invalid(format!("link {a} is a self loop at node {}", link.tail));
            }
        }
        let mut pairs: Vec<(NodeId, NodeId)> = links.iter().map(|l| (l.tail, l.head)).collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0] == w[1]) {
            return invalid("parallel links are not supported".into());
        }
        if origins.is_empty() || destinations.is_empty() {
            return invalid("at least one origin and one destination are required".into());
        }
        for o in &origins {
            if !known(o.node) {
                return invalid(format!("origin {} is not a node", o.node));
            }
            if !(o.demand.is_finite() && o.demand >= 0.0) {
                return invalid(format!("origin {} has demand {}", o.node, o.demand));
            }
        }
        if !origins.iter().any(|o| o.demand > 0.0) {
            return invalid("every origin demand is zero".into());
        }
        for &s in &destinations {
            if !known(s) {
                return invalid(format!("destination {s} is not a node"));
            }
        }
        let mut ids: Vec<NodeId> = origins.iter().map(|o| o.node).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate origin".into());
        }
        let mut ids = destinations.clone();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return invalid("duplicate destination".into());
        }
        if !(total_firms.is_finite() && total_firms > 0.0) {
            return invalid(format!("total firms must be positive, got {total_firms}"));
        }
        Ok(Self {
            nodes,
            links,
            origins,
            destinations,
            total_firms,
        })
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn origins(&self) -> &[Origin] {
        &self.origins
    }

    pub fn destinations(&self) -> &[NodeId] {
        &self.destinations
    }

    pub fn total_firms(&self) -> f64 {
        self.total_firms
    }

    pub fn total_demand(&self) -> f64 {
        self.origins.iter().map(|o| o.demand).sum()
    }

    pub fn od_count(&self) -> usize {
        self.origins.len() * self.destinations.len()
    }

    /// Same network with new origin demands (one per origin, in order).
    pub fn with_demands(&self, demands: &[f64]) -> Result<Self> {
        if demands.len() != self.origins.len() {
            return Err(Error::DimensionMismatch {
                what: "origin demands",
                expected: self.origins.len(),
                found: demands.len(),
            });
        }
        let origins = self
            .origins
            .iter()
            .zip(demands)
            .map(|(o, &demand)| Origin { node: o.node, demand })
            .collect();
        Self::new(
            self.nodes.clone(),
            self.links.clone(),
            origins,
            self.destinations.clone(),
            self.total_firms,
        )
    }
}

/// A simple route: node sequence plus the indices of the links it uses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub nodes: Vec<NodeId>,
    pub links: Vec<usize>,
}

/// All simple routes of every OD pair, stored flat and grouped by OD pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RouteSet {
    destinations: usize,
    link_count: usize,
    routes: Vec<Route>,
    path_od: Vec<usize>,
    od_start: Vec<usize>,
}

impl RouteSet {
    pub fn od_count(&self) -> usize {
        self.od_start.len() - 1
    }

    pub fn destination_count(&self) -> usize {
        self.destinations
    }

    pub fn link_count(&self) -> usize {
        self.link_count
    }

    pub fn path_count(&self) -> usize {
        self.routes.len()
    }

    pub fn od_index(&self, origin: usize, destination: usize) -> usize {
        origin * self.destinations + destination
    }

    /// Origin and destination positions of an OD index.
    pub fn od_pair(&self, od: usize) -> (usize, usize) {
        (od / self.destinations, od % self.destinations)
    }

    /// Flat path indices belonging to an OD pair.
    pub fn od_paths(&self, od: usize) -> Range<usize> {
        self.od_start[od]..self.od_start[od + 1]
    }

    pub fn routes(&self, od: usize) -> &[Route] {
        &self.routes[self.od_paths(od)]
    }

    pub fn route(&self, path: usize) -> &Route {
        &self.routes[path]
    }

    pub fn path_od(&self, path: usize) -> usize {
        self.path_od[path]
    }

    /// Link-path incidence: whether `link` lies on flat path `path`.
    pub fn incidence(&self, link: usize, path: usize) -> bool {
        self.routes[path].links.contains(&link)
    }
}

/// Enumerates every simple route for every OD pair.
///
/// Routes of an OD pair are ordered lexicographically by node label
/// sequence. Fails when a pair has no route or more than `max_routes`.
pub fn enumerate_routes(network: &Network, max_routes: usize) -> Result<RouteSet> {
    // Outgoing links per node, sorted by head label so the depth-first walk
    // visits node sequences in lexicographic order.
    let mut out: BTreeMap<NodeId, Vec<(NodeId, usize)>> = BTreeMap::new();
    for (a, link) in network.links.iter().enumerate() {
        out.entry(link.tail).or_default().push((link.head, a));
    }
    for adj in out.values_mut() {
        adj.sort_unstable();
    }

    let mut routes = Vec::new();
    let mut path_od = Vec::new();
    let mut od_start = vec![0];
    for origin in &network.origins {
        for &dest in &network.destinations {
            let od = od_start.len() - 1;
            let mut walk = Walk {
                out: &out,
                target: dest,
                limit: max_routes,
                nodes: vec![origin.node],
                links: Vec::new(),
                found: Vec::new(),
                exceeded: false,
            };
            walk.run(origin.node);
            if walk.exceeded {
                return Err(Error::RouteLimitExceeded {
                    origin: origin.node,
                    destination: dest,
                    limit: max_routes,
                });
            }
            if walk.found.is_empty() {
                return Err(Error::Unreachable {
                    origin: origin.node,
                    destination: dest,
                });
            }
            path_od.extend(core::iter::repeat(od).take(walk.found.len()));
            routes.extend(walk.found);
            od_start.push(routes.len());
        }
    }
    Ok(RouteSet {
        destinations: network.destinations.len(),
        link_count: network.links.len(),
        routes,
        path_od,
        od_start,
    })
}

struct Walk<'a> {
    out: &'a BTreeMap<NodeId, Vec<(NodeId, usize)>>,
    target: NodeId,
    limit: usize,
    nodes: Vec<NodeId>,
    links: Vec<usize>,
    found: Vec<Route>,
    exceeded: bool,
}

impl Walk<'_> {
    fn run(&mut self, at: NodeId) {
        if self.exceeded {
            return;
        }
        if at == self.target {
            if self.found.len() == self.limit {
                self.exceeded = true;
            } else {
                self.found.push(Route {
                    nodes: self.nodes.clone(),
                    links: self.links.clone(),
                });
            }
            return;
        }
        let Some(adj) = self.out.get(&at) else {
            return;
        };
        for &(next, link) in adj {
            if self.nodes.contains(&next) {
                continue;
            }
            self.nodes.push(next);
            self.links.push(link);
            self.run(next);
            self.nodes.pop();
            self.links.pop();
        }
    }
}

/// Link flows, OD demands and destination demands implied by path flows.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregates {
    pub link_flow: Vec<f64>,
    pub od_demand: Vec<f64>,
    pub dest_demand: Vec<f64>,
}

pub fn project_state(routes: &RouteSet, path_flow: &[f64]) -> Result<Aggregates> {
    if path_flow.len() != routes.path_count() {
        return Err(Error::DimensionMismatch {
            what: "path flows",
            expected: routes.path_count(),
            found: path_flow.len(),
        });
    }
    let mut link_flow = vec![0.0; routes.link_count()];
    let mut od_demand = vec![0.0; routes.od_count()];
    let mut dest_demand = vec![0.0; routes.destination_count()];
    for (p, &f) in path_flow.iter().enumerate() {
        for &a in &routes.route(p).links {
            link_flow[a] += f;
        }
        od_demand[routes.path_od(p)] += f;
    }
    for (od, &q) in od_demand.iter().enumerate() {
        dest_demand[routes.od_pair(od).1] += q;
    }
    Ok(Aggregates {
        link_flow,
        od_demand,
        dest_demand,
    })
}

/// A point of the joint feasible set: path flows, link flows, OD demands,
/// destination demands and the business distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedState {
    pub path_flow: Vec<f64>,
    pub link_flow: Vec<f64>,
    pub od_demand: Vec<f64>,
    pub dest_demand: Vec<f64>,
    pub firms: Vec<f64>,
}

impl CombinedState {
    pub fn from_path_flows(routes: &RouteSet, path_flow: Vec<f64>, firms: Vec<f64>) -> Result<Self> {
        if firms.len() != routes.destination_count() {
            return Err(Error::DimensionMismatch {
                what: "firm distribution",
                expected: routes.destination_count(),
                found: firms.len(),
            });
        }
        let agg = project_state(routes, &path_flow)?;
        Ok(Self {
            path_flow,
            link_flow: agg.link_flow,
            od_demand: agg.od_demand,
            dest_demand: agg.dest_demand,
            firms,
        })
    }

    /// Largest absolute component difference over every block.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        [
            sup_distance(&self.path_flow, &other.path_flow),
            sup_distance(&self.link_flow, &other.link_flow),
            sup_distance(&self.od_demand, &other.od_demand),
            sup_distance(&self.dest_demand, &other.dest_demand),
            sup_distance(&self.firms, &other.firms),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn scale(&self) -> f64 {
        [
            sup_norm(&self.path_flow),
            sup_norm(&self.link_flow),
            sup_norm(&self.od_demand),
            sup_norm(&self.dest_demand),
            sup_norm(&self.firms),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Constraint {
    PathNonnegative,
    RouteConservation,
    OriginConservation,
    LinkAggregation,
    DestinationAggregation,
    FirmsNonnegative,
    FirmTotal,
    Dimensions,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::PathNonnegative => "path flows nonnegative",
            Self::RouteConservation => "route flows sum to OD demand",
            Self::OriginConservation => "OD demands sum to origin demand",
            Self::LinkAggregation => "link flows aggregate path flows",
            Self::DestinationAggregation => "destination demands aggregate OD demands",
            Self::FirmsNonnegative => "firm counts nonnegative",
            Self::FirmTotal => "firm counts sum to the total",
            Self::Dimensions => "vector dimensions",
        })
    }
}

/// Per-constraint residuals of a feasibility check.
#[derive(Debug, Clone, PartialEq)]
pub struct StateCheck {
    pub tolerance: f64,
    pub residuals: Vec<(Constraint, f64)>,
}

impl StateCheck {
    pub fn is_valid(&self) -> bool {
        self.residuals.iter().all(|&(_, r)| r <= self.tolerance)
    }

    pub fn residual(&self, which: Constraint) -> f64 {
        self.residuals
            .iter()
            .find(|(c, _)| *c == which)
            .map_or(0.0, |&(_, r)| r)
    }

    pub fn worst(&self) -> f64 {
        self.residuals.iter().fold(0.0, |m, &(_, r)| m.max(r))
    }
}

/// Checks membership of `state` in the traveler and business feasible sets.
pub fn validate_state(state: &CombinedState, network: &Network, routes: &RouteSet, tol: f64) -> StateCheck {
    let dims_ok = state.path_flow.len() == routes.path_count()
        && state.link_flow.len() == routes.link_count()
        && state.od_demand.len() == routes.od_count()
        && state.dest_demand.len() == routes.destination_count()
        && state.firms.len() == routes.destination_count()
        && network.od_count() == routes.od_count();
    if !dims_ok {
        return StateCheck {
            tolerance: tol,
            residuals: vec![(Constraint::Dimensions, f64::INFINITY)],
        };
    }
    let negative = |v: &[f64]| v.iter().fold(0.0_f64, |m, &x| m.max(-x));
    let mut route = 0.0_f64;
    for od in 0..routes.od_count() {
        let sum: f64 = state.path_flow[routes.od_paths(od)].iter().sum();
        route = route.max((sum - state.od_demand[od]).abs());
    }
    let nd = routes.destination_count();
    let mut origin = 0.0_f64;
    for (r, o) in network.origins().iter().enumerate() {
        let sum: f64 = state.od_demand[r * nd..(r + 1) * nd].iter().sum();
        origin = origin.max((sum - o.demand).abs());
    }
    let agg = project_state(routes, &state.path_flow).expect("dimensions checked");
    let mut dest = 0.0_f64;
    for s in 0..nd {
        let sum: f64 = (0..network.origins().len())
            .map(|r| state.od_demand[r * nd + s])
            .sum();
        dest = dest.max((sum - state.dest_demand[s]).abs());
    }
    let firm_sum: f64 = state.firms.iter().sum();
    StateCheck {
        tolerance: tol,
        residuals: vec![
            (Constraint::PathNonnegative, negative(&state.path_flow)),
            (Constraint::RouteConservation, route),
            (Constraint::OriginConservation, origin),
            (
                Constraint::LinkAggregation,
                sup_distance(&agg.link_flow, &state.link_flow),
            ),
            (Constraint::DestinationAggregation, dest),
            (Constraint::FirmsNonnegative, negative(&state.firms)),
            (
                Constraint::FirmTotal,
                (firm_sum - network.total_firms()).abs(),
            ),
        ],
    }
}
