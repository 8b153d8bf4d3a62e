//! Scenario files (TOML).
//!
//! ```toml
//! network = "t2.net"          # relative to the scenario file
//! pricing = "full"            # none | road | full
//!
//! [logit]
//! route = 1.0                 # route dispersion, must be >= destination
//! location = 0.8
//! destination = 0.6
//!
//! [solver]                    # optional, any subset
//! tolerance = 1e-10
//! max_iterations = 300
//! fixed_step = 0.5            # fixed averaging step instead of 1/n
//!
//! [search]                    # optional: system-optimum multistart
//! starts = 4
//! seed = 1
//!
//! [sweep]                     # optional: demand scenarios
//! base = [40, 60]             # one demand per origin, in [origins] order
//! increment = 5
//! count = 12
//!
//! [oracle]                    # optional
//! resolution = 200
//! ```

use std::path::{Path, PathBuf};

use bizland_core::network::DEFAULT_MAX_ROUTES;
use bizland_core::oracle::GridSpec;
use bizland_core::pricing::PricingOptions;
use bizland_core::{Damping, EquilibriumConfig, LogitParams, Model};
use serde::Deserialize;

use crate::netfile::NetworkFile;
use crate::Failure;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PricingMode {
    #[default]
    None,
    Road,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogitSection {
    pub route: f64,
    pub location: f64,
    pub destination: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub fixed_step: Option<f64>,
    pub inner_step: Option<f64>,
    pub diagonalization_sweeps: Option<usize>,
    pub switch_tolerance: Option<f64>,
    pub oscillation_window: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSection {
    pub starts: Option<usize>,
    pub seed: Option<u64>,
    pub reject_multiple: Option<bool>,
    pub cross_check: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub base: Vec<f64>,
    pub increment: f64,
    pub count: usize,
}

impl SweepSection {
    /// Origin demands of scenario `k` (1-based).
    pub fn demands(&self, k: usize) -> Vec<f64> {
        self.base
            .iter()
            .map(|b| b + self.increment * (k - 1) as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleSection {
    pub resolution: Option<usize>,
    pub max_points: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub network: PathBuf,
    pub logit: LogitSection,
    #[serde(default)]
    pub pricing: PricingMode,
    pub max_routes: Option<usize>,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub search: SearchSection,
    pub sweep: Option<SweepSection>,
    #[serde(default)]
    pub oracle: OracleSection,
}

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::Parse(e.to_string()))
    }

    pub fn logit(&self) -> Result<LogitParams, Failure> {
        let l = self.logit;
        Ok(LogitParams::new(l.route, l.location, l.destination)?)
    }

    pub fn config(&self) -> Result<EquilibriumConfig, Failure> {
        let s = &self.solver;
        let d = EquilibriumConfig::default();
        let config = EquilibriumConfig {
            tolerance: s.tolerance.unwrap_or(d.tolerance),
            max_iterations: s.max_iterations.unwrap_or(d.max_iterations),
            damping: s.fixed_step.map_or(d.damping, Damping::Fixed),
            inner_step: s.inner_step.unwrap_or(d.inner_step),
            flow_floor: d.flow_floor,
            diagonalization_sweeps: s.diagonalization_sweeps.unwrap_or(d.diagonalization_sweeps),
            switch_tolerance: s.switch_tolerance.unwrap_or(d.switch_tolerance),
            oscillation_window: s.oscillation_window.unwrap_or(d.oscillation_window),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn search(&self) -> PricingOptions {
        let s = &self.search;
        let d = PricingOptions::default();
        PricingOptions {
            starts: s.starts.unwrap_or(d.starts),
            seed: s.seed.unwrap_or(d.seed),
            reject_multiple: s.reject_multiple.unwrap_or(d.reject_multiple),
            cross_check: s.cross_check.unwrap_or(d.cross_check),
            ..d
        }
    }

    pub fn grid(&self) -> Result<GridSpec, Failure> {
        let d = GridSpec::default();
        let grid = GridSpec {
            resolution: self.oracle.resolution.unwrap_or(d.resolution),
            max_points: self.oracle.max_points.unwrap_or(d.max_points),
        };
        if grid.resolution < 2 {
            return Err(Failure::Validation("oracle resolution must be at least 2".into()));
        }
        Ok(grid)
    }

    fn check_sweep(&self, origins: usize) -> Result<(), Failure> {
        let Some(sweep) = &self.sweep else {
            return Ok(());
        };
        if !(sweep.increment > 0.0) || sweep.count == 0 {
            return Err(Failure::Validation("sweep increment and count must be positive".into()));
        }
        if sweep.base.len() != origins {
            return Err(Failure::Validation(format!(
                "sweep base lists {} demands for {origins} origins",
                sweep.base.len()
            )));
        }
        if sweep.base.iter().any(|&b| !(b >= 0.0)) {
            return Err(Failure::Validation("sweep base demands must be nonnegative".into()));
        }
        Ok(())
    }
}

/// A scenario together with its parsed network and validated model.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub name: String,
    pub scenario: Scenario,
    pub network: NetworkFile,
    pub model: Model,
    pub config: EquilibriumConfig,
}

impl Loaded {
    pub fn from_path(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
        let scenario = Scenario::parse(&text).map_err(|e| e.context(&path.display().to_string()))?;
        let net_path = path.parent().unwrap_or(Path::new(".")).join(&scenario.network);
        let net_text =
            std::fs::read_to_string(&net_path).map_err(|e| Failure::Io(format!("{}: {e}", net_path.display())))?;
        let network = NetworkFile::parse(&net_text).map_err(|e| e.context(&net_path.display().to_string()))?;
        let name = path
            .file_name()
            .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned());
        Self::build(name, scenario, network)
    }

    pub fn build(name: String, scenario: Scenario, network: NetworkFile) -> Result<Self, Failure> {
        let logit = scenario.logit()?;
        let model = network.to_model(logit, scenario.max_routes.unwrap_or(DEFAULT_MAX_ROUTES))?;
        let config = scenario.config()?;
        scenario.check_sweep(model.origin_count())?;
        scenario.grid()?;
        Ok(Self {
            name,
            scenario,
            network,
            model,
            config,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "network = \"x.net\"\n[logit]\nroute = 1.0\nlocation = 1.0\ndestination = 0.5\n";

    #[test]
    fn defaults_fill_missing_sections() {
        let s = Scenario::parse(MINIMAL).unwrap();
        assert_eq!(s.pricing, PricingMode::None);
        assert_eq!(s.config().unwrap(), EquilibriumConfig::default());
        assert_eq!(s.search(), PricingOptions::default());
        assert_eq!(s.grid().unwrap(), GridSpec::default());
    }

    #[test]
    fn route_dispersion_below_destination_is_rejected() {
        let s = Scenario::parse(&MINIMAL.replace("destination = 0.5", "destination = 2.0")).unwrap();
        let err = s.logit().unwrap_err();
        assert!(matches!(&err, Failure::Validation(m) if m.contains("alpha >= gamma")), "{err}");
    }

    #[test]
    fn unknown_keys_are_parse_errors() {
        assert!(matches!(Scenario::parse(&format!("{MINIMAL}bogus = 1\n")), Err(Failure::Parse(_))));
        assert!(matches!(Scenario::parse("network = 3"), Err(Failure::Parse(_))));
    }

    #[test]
    fn sweep_demands_step_up() {
        let sweep = SweepSection {
            base: vec![40.0, 60.0],
            increment: 5.0,
            count: 12,
        };
        assert_eq!(sweep.demands(1), vec![40.0, 60.0]);
        assert_eq!(sweep.demands(12), vec![95.0, 115.0]);
    }

    #[test]
    fn bad_sweep_is_a_validation_error() {
        let text = format!("{MINIMAL}[sweep]\nbase = [1.0]\nincrement = 0.0\ncount = 3\n");
        let s = Scenario::parse(&text).unwrap();
        assert!(matches!(s.check_sweep(1), Err(Failure::Validation(_))));
        let text = format!("{MINIMAL}[sweep]\nbase = [1.0, 2.0]\nincrement = 1.0\ncount = 3\n");
        assert!(matches!(Scenario::parse(&text).unwrap().check_sweep(1), Err(Failure::Validation(_))));
    }
}
