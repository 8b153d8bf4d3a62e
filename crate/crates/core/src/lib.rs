//! Combined equilibrium of travelers and business locations on a road
//! network, together with the marginal-cost pricing schemes that support
//! the traffic and overall system optima.
//!
//! Travelers pick a destination (business center) and then a route with a
//! nested logit model; firms pick a center with a plain logit model. Each
//! side's attraction depends on how many of the other side chose the same
//! center. The crate provides:
//!
//! - [`network`]: topology, origin demands, simple-route enumeration and
//!   feasibility checks for flow/business states.
//! - [`behavior`]: link travel times, trip and business attraction
//!   functions, their partial derivatives and the externality-adjusted
//!   versions used by the optimality conditions.
//! - [`equilibrium`]: logit choice maps, fixed-point solvers for the
//!   parametric and combined equilibria, the VI gap certificate and the
//!   uniqueness check.
//! - [`pricing`]: social-cost objectives, system-optimum solvers and
//!   extraction/verification of link tolls, entrance fees and business taxes.
//! - [`oracle`]: brute-force grid searches and direct minimization used to
//!   cross-check the solvers on tiny instances.
//!
//! The crate is `no_std` and only needs `alloc`.
#![no_std]

extern crate alloc;

pub mod behavior;
pub mod equilibrium;
mod error;
pub mod fixtures;
mod math;
mod model;
pub mod network;
pub mod oracle;
pub mod pricing;

pub use behavior::{
    Attraction, AttractionValues, Behavior, BusinessAttraction, Charges, LinkTime, LogitParams,
    Regime, TripAttraction,
};
pub use equilibrium::{
    solve_combined, solve_combined_from, solve_parametric_location, solve_parametric_traffic,
    vi_gap, Damping, EquilibriumConfig, GapReport,
};
pub use error::Error;
pub use model::Model;
pub use network::{enumerate_routes, CombinedState, Network, NodeId, RouteSet};
pub use pricing::{CostBreakdown, PricingScheme, SchemeKind};

pub type Result<T, E = Error> = core::result::Result<T, E>;
