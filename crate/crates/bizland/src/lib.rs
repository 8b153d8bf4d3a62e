//! File formats, reports, the demand sweep and the command-line front end
//! for `bizland-core`.

pub mod cli;
pub mod commands;
mod error;
pub mod netfile;
pub mod pricefile;
pub mod report;
pub mod scenario;
pub mod sweep;

pub use error::{exit, Failure};
pub use scenario::{Loaded, PricingMode, Scenario};
