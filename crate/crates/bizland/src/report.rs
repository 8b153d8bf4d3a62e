//! Serializable records shared by the command reports, and plain-text tables.

use bizland_core::pricing::CostBreakdown;
use bizland_core::{Charges, CombinedState, GapReport, Model, NodeId};
use serde::{Deserialize, Serialize};

use crate::pricefile::path_label;
use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathRecord {
    pub route: String,
    pub flow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkRecord {
    pub tail: NodeId,
    pub head: NodeId,
    pub flow: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OdRecord {
    pub origin: NodeId,
    pub destination: NodeId,
    pub demand: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DestinationRecord {
    pub node: NodeId,
    pub demand: f64,
    pub firms: f64,
}

/// A combined state labelled by node ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub paths: Vec<PathRecord>,
    pub links: Vec<LinkRecord>,
    pub od: Vec<OdRecord>,
    pub destinations: Vec<DestinationRecord>,
}

impl StateRecord {
    pub fn new(model: &Model, state: &CombinedState) -> Self {
        let net = &model.network;
        let routes = &model.routes;
        Self {
            paths: (0..routes.path_count())
                .map(|p| PathRecord {
                    route: path_label(&routes.route(p).nodes),
                    flow: state.path_flow[p],
                })
                .collect(),
            links: net
                .links()
                .iter()
                .zip(&state.link_flow)
                .map(|(l, &flow)| LinkRecord {
                    tail: l.tail,
                    head: l.head,
                    flow,
                })
                .collect(),
            od: (0..routes.od_count())
                .map(|od| {
                    let (r, s) = routes.od_pair(od);
                    OdRecord {
                        origin: net.origins()[r].node,
                        destination: net.destinations()[s],
                        demand: state.od_demand[od],
                    }
                })
                .collect(),
            destinations: net
                .destinations()
                .iter()
                .enumerate()
                .map(|(s, &node)| DestinationRecord {
                    node,
                    demand: state.dest_demand[s],
                    firms: state.firms[s],
                })
                .collect(),
        }
    }

    /// The recorded state, taken as written (not recomputed from paths),
    /// after checking that its labels match the model.
    pub fn to_state(&self, model: &Model) -> Result<CombinedState, Failure> {
        let expected = Self::new(model, &CombinedState::from_path_flows(
            &model.routes,
            vec![0.0; model.routes.path_count()],
            vec![0.0; model.destination_count()],
        )?);
        let same = self.paths.len() == expected.paths.len()
            && self.paths.iter().zip(&expected.paths).all(|(a, b)| a.route == b.route)
            && self.links.len() == expected.links.len()
            && self.links.iter().zip(&expected.links).all(|(a, b)| (a.tail, a.head) == (b.tail, b.head))
            && self.od.len() == expected.od.len()
            && self
                .od
                .iter()
                .zip(&expected.od)
                .all(|(a, b)| (a.origin, a.destination) == (b.origin, b.destination))
            && self.destinations.len() == expected.destinations.len()
            && self.destinations.iter().zip(&expected.destinations).all(|(a, b)| a.node == b.node);
        if !same {
            return Err(Failure::Validation("recorded state does not match the network".into()));
        }
        Ok(CombinedState {
            path_flow: self.paths.iter().map(|p| p.flow).collect(),
            link_flow: self.links.iter().map(|l| l.flow).collect(),
            od_demand: self.od.iter().map(|o| o.demand).collect(),
            dest_demand: self.destinations.iter().map(|d| d.demand).collect(),
            firms: self.destinations.iter().map(|d| d.firms).collect(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapRecord {
    pub vi_gap: f64,
    pub max_residual: f64,
    pub route_residual: Option<f64>,
    pub destination_residual: Option<f64>,
    pub location_residual: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl From<&GapReport> for GapRecord {
    fn from(r: &GapReport) -> Self {
        Self {
            vi_gap: r.vi_gap,
            max_residual: r.max_residual(),
            route_residual: r.route_residual,
            destination_residual: r.destination_residual,
            location_residual: r.location_residual,
            iterations: r.iterations,
            converged: r.converged,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostRecord {
    pub route_entropy: f64,
    pub destination_entropy: f64,
    pub firm_entropy: f64,
    pub travel_time: f64,
    pub traveler_benefit: f64,
    pub firm_benefit: f64,
    pub travelers: f64,
    pub total: f64,
}

impl From<CostBreakdown> for CostRecord {
    fn from(c: CostBreakdown) -> Self {
        Self {
            route_entropy: c.route_entropy,
            destination_entropy: c.destination_entropy,
            firm_entropy: c.firm_entropy,
            travel_time: c.travel_time,
            traveler_benefit: c.traveler_benefit,
            firm_benefit: c.firm_benefit,
            travelers: c.travelers,
            total: c.total,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TollRecord {
    pub tail: NodeId,
    pub head: NodeId,
    pub toll: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CenterChargeRecord {
    pub node: NodeId,
    pub entrance_fee: f64,
    pub business_tax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChargesRecord {
    pub links: Vec<TollRecord>,
    pub destinations: Vec<CenterChargeRecord>,
}

impl ChargesRecord {
    pub fn new(model: &Model, c: &Charges) -> Self {
        Self {
            links: model
                .network
                .links()
                .iter()
                .zip(&c.link_toll)
                .map(|(l, &toll)| TollRecord {
                    tail: l.tail,
                    head: l.head,
                    toll,
                })
                .collect(),
            destinations: model
                .network
                .destinations()
                .iter()
                .enumerate()
                .map(|(s, &node)| CenterChargeRecord {
                    node,
                    entrance_fee: c.entrance_fee[s],
                    business_tax: c.business_tax[s],
                })
                .collect(),
        }
    }
}

/// Fixed-precision cell; `-` for missing values.
pub fn num(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.6}")
    } else {
        "-".into()
    }
}

pub fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".into(), num)
}

pub fn sci(v: f64) -> String {
    format!("{v:.3e}")
}

/// Right-aligned columns under a header row.
pub fn table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<&str>| {
        cells
            .iter()
            .zip(&widths)
            .map(|(c, &w)| format!("{c:>w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            + "\n"
    };
    let mut out = line(headers.to_vec());
    out += &line(widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().iter().map(String::as_str).collect());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

pub fn state_tables(record: &StateRecord) -> String {
    let mut out = String::from("routes\n");
    out += &table(
        &["route", "flow"],
        &record.paths.iter().map(|p| vec![p.route.clone(), num(p.flow)]).collect::<Vec<_>>(),
    );
    out += "\nlinks\n";
    out += &table(
        &["tail", "head", "flow"],
        &record
            .links
            .iter()
            .map(|l| vec![l.tail.to_string(), l.head.to_string(), num(l.flow)])
            .collect::<Vec<_>>(),
    );
    out += "\norigin-destination demand\n";
    out += &table(
        &["origin", "destination", "demand"],
        &record
            .od
            .iter()
            .map(|o| vec![o.origin.to_string(), o.destination.to_string(), num(o.demand)])
            .collect::<Vec<_>>(),
    );
    out += "\nbusiness centers\n";
    out += &table(
        &["node", "demand", "firms"],
        &record
            .destinations
            .iter()
            .map(|d| vec![d.node.to_string(), num(d.demand), num(d.firms)])
            .collect::<Vec<_>>(),
    );
    out
}

pub fn cost_table(c: &CostRecord) -> String {
    table(
        &["term", "value"],
        &[
            ("route entropy", c.route_entropy),
            ("destination entropy", c.destination_entropy),
            ("firm entropy", c.firm_entropy),
            ("travel time", c.travel_time),
            ("traveler benefit", c.traveler_benefit),
            ("firm benefit", c.firm_benefit),
            ("traveler social cost", c.travelers),
            ("total social cost", c.total),
        ]
        .iter()
        .map(|(k, v)| vec![k.to_string(), num(*v)])
        .collect::<Vec<_>>(),
    )
}

pub fn charges_table(c: &ChargesRecord) -> String {
    let mut out = table(
        &["tail", "head", "toll"],
        &c.links
            .iter()
            .map(|l| vec![l.tail.to_string(), l.head.to_string(), num(l.toll)])
            .collect::<Vec<_>>(),
    );
    out += "\n";
    out += &table(
        &["node", "entrance fee", "business tax"],
        &c.destinations
            .iter()
            .map(|d| vec![d.node.to_string(), num(d.entrance_fee), num(d.business_tax)])
            .collect::<Vec<_>>(),
    );
    out
}
