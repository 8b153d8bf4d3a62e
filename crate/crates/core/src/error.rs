use alloc::string::String;
use alloc::vec::Vec;

use crate::network::NodeId;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid logit parameters: {0}")]
    InvalidLogit(String),

    #[error("more than {limit} simple routes between {origin} and {destination}")]
    RouteLimitExceeded {
        origin: NodeId,
        destination: NodeId,
        limit: usize,
    },

    #[error("destination {destination} is unreachable from origin {origin}")]
    Unreachable { origin: NodeId, destination: NodeId },

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("negative flow {value} on link {link}")]
    NegativeFlow { link: usize, value: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("residual stopped decreasing after {iterations} iterations (residual {residual:e})")]
    OscillationDetected {
        iterations: usize,
        residual: f64,
        trace: Vec<f64>,
    },

    #[error("state is outside the feasible set (largest constraint residual {residual:e})")]
    InfeasibleState { residual: f64 },

    #[error("instance too large for exhaustive search: {0}")]
    InstanceTooLarge(String),

    #[error("none of the {starts} starts produced a point satisfying the optimality conditions")]
    NoKktPoint { starts: usize },

    #[error("{count} distinct solutions found")]
    MultipleSolutions { count: usize },
}
