//! Built-in test instances.
//!
//! All parameter values here are our own choices. The six-node network is
//! a reconstruction: origins 1 and 2, business centers 4 and 5, and
//! intermediate nodes 3 and 6 joined by seven links.

use alloc::vec;
use alloc::vec::Vec;

use crate::behavior::{Attraction, BusinessAttraction, LinkTime, TripAttraction};
use crate::network::{Link, Origin, DEFAULT_MAX_ROUTES};
use crate::{Behavior, LogitParams, Model, Network, NodeId};

/// Demands of the first sweep scenario (origins 1 and 2).
pub const SWEEP_BASE: [f64; 2] = [40.0, 60.0];
/// Demand increment between consecutive sweep scenarios.
pub const SWEEP_INCREMENT: f64 = 5.0;
pub const SWEEP_SCENARIOS: usize = 12;
/// Firms in the six-node network.
pub const SIX_NODE_FIRMS: f64 = 50.0;

fn link_time(free_flow: f64, coefficient: f64, power: f64) -> LinkTime {
    LinkTime {
        free_flow,
        coefficient,
        power,
    }
}

/// Power-4 link with the usual `0.15 t0 (x / capacity)^4` congestion term.
fn bpr(free_flow: f64, capacity: f64) -> LinkTime {
    link_time(free_flow, 0.15 * free_flow / libm::pow(capacity, 4.0), 4.0)
}

fn attraction(trip: [f64; 4], business: [f64; 3]) -> Attraction {
    Attraction {
        trip: TripAttraction {
            base: trip[0],
            firm_gain: trip[1],
            crowding: trip[2],
            crowding_quadratic: trip[3],
        },
        business: BusinessAttraction {
            base: business[0],
            customer_gain: business[1],
            rivalry: business[2],
        },
    }
}

fn build(
    nodes: Vec<NodeId>,
    links: Vec<((NodeId, NodeId), LinkTime)>,
    origins: Vec<(NodeId, f64)>,
    destinations: Vec<(NodeId, Attraction)>,
    firms: f64,
    logit: (f64, f64, f64),
) -> Model {
    let network = Network::new(
        nodes,
        links.iter().map(|&((tail, head), _)| Link { tail, head }).collect(),
        origins.iter().map(|&(node, demand)| Origin { node, demand }).collect(),
        destinations.iter().map(|&(s, _)| s).collect(),
        firms,
    )
    .expect("fixture network is valid");
    let behavior = Behavior {
        links: links.iter().map(|&(_, t)| t).collect(),
        destinations: destinations.iter().map(|&(_, a)| a).collect(),
    };
    let logit = LogitParams::new(logit.0, logit.1, logit.2).expect("fixture logit is valid");
    Model::new(network, behavior, logit, DEFAULT_MAX_ROUTES).expect("fixture routes enumerate")
}

/// One origin (O = 10), two identical destinations each reached by one
/// identical link, four firms.
pub fn symmetric() -> Model {
    let link = link_time(10.0, 0.5, 1.0);
    let center = attraction([20.0, 1.0, 0.5, 0.01], [5.0, 0.3, 1.0]);
    build(
        vec![1, 2, 3],
        vec![((1, 2), link), ((1, 3), link)],
        vec![(1, 10.0)],
        vec![(2, center), (3, center)],
        4.0,
        (1.0, 1.0, 0.5),
    )
}

/// One origin (O = 10), destinations 3 and 4, three routes in total
/// (two to node 3, one to node 4), five firms. Parameters satisfy the
/// uniqueness conditions.
pub fn tiny() -> Model {
    build(
        vec![1, 2, 3, 4],
        vec![
            ((1, 2), link_time(2.0, 0.1, 2.0)),
            ((2, 3), link_time(2.0, 0.1, 2.0)),
            ((1, 3), link_time(5.0, 0.2, 1.0)),
            ((1, 4), link_time(4.0, 0.3, 1.0)),
        ],
        vec![(1, 10.0)],
        vec![
            (3, attraction([12.0, 0.6, 0.8, 0.01], [3.0, 0.4, 1.0])),
            (4, attraction([10.0, 0.6, 0.9, 0.01], [4.0, 0.4, 1.2])),
        ],
        5.0,
        (1.0, 0.8, 0.6),
    )
}

/// Same as [`tiny`] but with strong agglomeration so that the uniqueness
/// conditions fail.
pub fn tiny_agglomerating() -> Model {
    let mut model = tiny();
    for attr in &mut model.behavior.destinations {
        attr.trip.firm_gain = 10.0;
        attr.trip.crowding = 0.01;
        attr.business.customer_gain = 10.0;
        attr.business.rivalry = 0.01;
    }
    model
}

/// Reconstructed six-node, seven-link network with the given demands at
/// origins 1 and 2 and fifty firms.
pub fn six_node(demands: [f64; 2]) -> Model {
    build(
        vec![1, 2, 3, 4, 5, 6],
        vec![
            ((1, 3), bpr(4.0, 30.0)),
            ((1, 6), bpr(6.0, 30.0)),
            ((2, 3), bpr(5.0, 40.0)),
            ((2, 6), bpr(4.0, 40.0)),
            ((3, 4), bpr(5.0, 50.0)),
            ((3, 5), bpr(7.0, 30.0)),
            ((6, 5), bpr(4.0, 50.0)),
        ],
        vec![(1, demands[0]), (2, demands[1])],
        vec![
            (4, attraction([8.0, 2.0, 0.05, 0.0005], [2.0, 0.04, 0.15])),
            (5, attraction([7.0, 2.5, 0.06, 0.0004], [3.0, 0.05, 0.12])),
        ],
        SIX_NODE_FIRMS,
        (0.5, 0.5, 0.25),
    )
}

/// Origin demands of sweep scenario `k` (1-based).
pub fn sweep_demands(k: usize) -> [f64; 2] {
    let step = SWEEP_INCREMENT * (k - 1) as f64;
    [SWEEP_BASE[0] + step, SWEEP_BASE[1] + step]
}
