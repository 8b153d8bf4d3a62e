use alloc::format;

use crate::network::{enumerate_routes, RouteSet};
use crate::{Behavior, Error, LogitParams, Network, Result};

/// A network with its behavioral parameters and enumerated routes.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub network: Network,
    pub behavior: Behavior,
    pub logit: LogitParams,
    pub routes: RouteSet,
}

impl Model {
    pub fn new(network: Network, behavior: Behavior, logit: LogitParams, max_routes: usize) -> Result<Self> {
        if behavior.links.len() != network.links().len() {
            return Err(Error::DimensionMismatch {
                what: "link time parameters",
                expected: network.links().len(),
                found: behavior.links.len(),
            });
        }
        if behavior.destinations.len() != network.destinations().len() {
            return Err(Error::DimensionMismatch {
                what: "attraction parameters",
                expected: network.destinations().len(),
                found: behavior.destinations.len(),
            });
        }
        let routes = enumerate_routes(&network, max_routes)?;
        Ok(Self {
            network,
            behavior,
            logit,
            routes,
        })
    }

    /// Same model with new origin demands; routes are reused.
    pub fn with_demands(&self, demands: &[f64]) -> Result<Self> {
        Ok(Self {
            network: self.network.with_demands(demands)?,
            ..self.clone()
        })
    }

    pub fn with_logit(&self, logit: LogitParams) -> Self {
        Self { logit, ..self.clone() }
    }

    pub fn link_count(&self) -> usize {
        self.network.links().len()
    }

    pub fn destination_count(&self) -> usize {
        self.network.destinations().len()
    }

    pub fn origin_count(&self) -> usize {
        self.network.origins().len()
    }

    pub(crate) fn check_len(&self, what: &'static str, expected: usize, found: usize) -> Result<()> {
        if expected == found {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { what, expected, found })
        }
    }

    /// Short human-readable summary.
    pub fn summary(&self) -> alloc::string::String {
        format!(
            "{} nodes, {} links, {} origins, {} destinations, {} routes, T = {}",
            self.network.nodes().len(),
            self.link_count(),
            self.origin_count(),
            self.destination_count(),
            self.routes.path_count(),
            self.network.total_firms()
        )
    }
}
