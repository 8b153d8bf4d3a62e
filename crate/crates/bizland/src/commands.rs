//! The operations behind each subcommand. Each returns a report with a
//! text rendering; the JSON form is the machine-readable output.

use bizland_core::behavior::validate_assumptions;
use bizland_core::equilibrium::{check_uniqueness, uniqueness_bounds, Condition, UniquenessVerdict};
use bizland_core::oracle::{grid_equilibrium, grid_optimum, share_coordinates, Objective};
use bizland_core::pricing::{
    extract_pricing, social_cost_total, solve_overall_so, solve_uniform_road_pricing, verify_support,
};
use bizland_core::{solve_combined, PricingScheme, SchemeKind};
use serde::Serialize;

use crate::netfile::Echo;
use crate::report::{
    charges_table, cost_table, num, opt, sci, state_tables, table, ChargesRecord, CostRecord, GapRecord, StateRecord,
};
use crate::scenario::{Loaded, PricingMode};
use crate::Failure;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub command: &'static str,
    pub scenario: String,
    pub network: Echo,
    pub state: StateRecord,
    pub gap: GapRecord,
    pub cost: CostRecord,
    pub warnings: Vec<String>,
}

fn warnings(loaded: &Loaded) -> Vec<String> {
    let report = validate_assumptions(&loaded.model.behavior);
    report
        .violations
        .iter()
        .map(|f| format!("violation: {f}"))
        .chain(report.warnings.iter().map(|f| format!("warning: {f}")))
        .collect()
}

pub fn solve(loaded: &Loaded) -> Result<SolveReport, Failure> {
    let model = &loaded.model;
    let (state, gap) = solve_combined(model, &loaded.config)?;
    Ok(SolveReport {
        command: "solve",
        scenario: loaded.name.clone(),
        network: loaded.network.echo.clone(),
        state: StateRecord::new(model, &state),
        gap: (&gap).into(),
        cost: social_cost_total(model, &state).into(),
        warnings: warnings(loaded),
    })
}

fn gap_table(g: &GapRecord) -> String {
    table(
        &["vi gap", "max residual", "iterations", "converged"],
        &[vec![sci(g.vi_gap), sci(g.max_residual), g.iterations.to_string(), g.converged.to_string()]],
    )
}

fn warning_lines(w: &[String]) -> String {
    w.iter().map(|l| format!("{l}\n")).collect()
}

impl SolveReport {
    pub fn text(&self) -> String {
        format!(
            "combined equilibrium: {}\n\n{}\n{}\nsocial cost\n{}{}",
            self.scenario,
            state_tables(&self.state),
            gap_table(&self.gap),
            cost_table(&self.cost),
            warning_lines(&self.warnings)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportRecord {
    pub holds: bool,
    pub state_distance: f64,
    pub cost_gap: f64,
    pub plug_in_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceReport {
    pub command: &'static str,
    pub scenario: String,
    pub mode: &'static str,
    pub network: Echo,
    pub untolled_state: StateRecord,
    pub untolled_cost: CostRecord,
    pub priced_state: StateRecord,
    pub priced_cost: CostRecord,
    /// Objective minimized: traveler social cost (road) or total social cost (full).
    pub objective: f64,
    pub gap: GapRecord,
    pub distinct_solutions: usize,
    pub direct_objective: Option<f64>,
    pub cross_check_warning: bool,
    pub charges: ChargesRecord,
    pub net_revenue: f64,
    pub support: Option<SupportRecord>,
}

/// Pricing scheme and report. `mode` must be road or full.
pub fn price(loaded: &Loaded, mode: PricingMode) -> Result<(PriceReport, PricingScheme), Failure> {
    let model = &loaded.model;
    let config = &loaded.config;
    let search = loaded.scenario.search();
    let (untolled, _) = solve_combined(model, config)?;
    let (state, objective, gap, distinct, direct, warning, scheme) = match mode {
        PricingMode::Road => {
            let out = solve_uniform_road_pricing(model, config, &search)?;
            (out.state, out.objective, out.report, out.candidates.len(), None, false, out.scheme)
        }
        PricingMode::Full => {
            let out = solve_overall_so(model, config, &search)?;
            let scheme = extract_pricing(model, &out.state);
            let n = out.candidates.len();
            (out.state, out.objective, out.report, n, out.direct_objective, out.cross_check_warning, scheme)
        }
        PricingMode::None => return Err(Failure::Validation("pricing mode must be road or full".into())),
    };
    let support = match scheme.kind {
        SchemeKind::Full => {
            let v = verify_support(model, &scheme, config)?;
            Some(SupportRecord {
                holds: v.holds,
                state_distance: v.state_distance,
                cost_gap: v.cost_gap,
                plug_in_residual: v.plug_in_residual,
            })
        }
        SchemeKind::RoadOnly => None,
    };
    let report = PriceReport {
        command: "price",
        scenario: loaded.name.clone(),
        mode: if mode == PricingMode::Road { "road" } else { "full" },
        network: loaded.network.echo.clone(),
        untolled_state: StateRecord::new(model, &untolled),
        untolled_cost: social_cost_total(model, &untolled).into(),
        priced_state: StateRecord::new(model, &state),
        priced_cost: social_cost_total(model, &state).into(),
        objective,
        gap: (&gap).into(),
        distinct_solutions: distinct,
        direct_objective: direct,
        cross_check_warning: warning,
        charges: ChargesRecord::new(model, &scheme.charges),
        net_revenue: scheme.net_revenue(),
        support,
    };
    Ok((report, scheme))
}

impl PriceReport {
    pub fn text(&self) -> String {
        let mut out = format!("{} pricing: {}\n\n", self.mode, self.scenario);
        out += &table(
            &["", "traveler cost", "total cost"],
            &[
                vec!["untolled".into(), num(self.untolled_cost.travelers), num(self.untolled_cost.total)],
                vec!["priced".into(), num(self.priced_cost.travelers), num(self.priced_cost.total)],
            ],
        );
        out += &format!(
            "\ndistinct solutions found: {}\ndirect minimization: {}{}\n\ncharges\n",
            self.distinct_solutions,
            opt(self.direct_objective),
            if self.cross_check_warning {
                " (lower than every stationary point)"
            } else {
                ""
            }
        );
        out += &charges_table(&self.charges);
        out += &format!("net revenue: {}\n", num(self.net_revenue));
        if let Some(s) = &self.support {
            out += &format!(
                "support: {} (state distance {}, cost gap {})\n",
                if s.holds { "holds" } else { "fails" },
                sci(s.state_distance),
                sci(s.cost_gap)
            );
        }
        out += "\npriced state\n";
        out += &state_tables(&self.priced_state);
        out += "\n";
        out += &gap_table(&self.gap);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub scenario: String,
    pub holds: bool,
    pub state_distance: f64,
    pub cost_gap: f64,
    pub plug_in_residual: f64,
    pub charges: ChargesRecord,
    pub target_state: StateRecord,
    pub priced_state: StateRecord,
    pub gap: GapRecord,
}

pub fn verify(loaded: &Loaded, scheme: &PricingScheme) -> Result<VerifyReport, Failure> {
    let model = &loaded.model;
    let v = verify_support(model, scheme, &loaded.config)?;
    Ok(VerifyReport {
        command: "verify",
        scenario: loaded.name.clone(),
        holds: v.holds,
        state_distance: v.state_distance,
        cost_gap: v.cost_gap,
        plug_in_residual: v.plug_in_residual,
        charges: ChargesRecord::new(model, &scheme.charges),
        target_state: StateRecord::new(model, &scheme.evaluated_at),
        priced_state: StateRecord::new(model, &v.priced_state),
        gap: (&v.priced_report).into(),
    })
}

impl VerifyReport {
    pub fn text(&self) -> String {
        format!(
            "support check: {}\n\n{}\nequilibrium under the posted charges\n{}\n{}",
            self.scenario,
            table(
                &["holds", "state distance", "cost gap", "plug-in residual"],
                &[vec![
                    self.holds.to_string(),
                    sci(self.state_distance),
                    sci(self.cost_gap),
                    sci(self.plug_in_residual)
                ]],
            ),
            state_tables(&self.priced_state),
            gap_table(&self.gap)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessRecord {
    pub destination: u32,
    pub condition: &'static str,
    pub demand: f64,
    pub firms: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub command: &'static str,
    pub scenario: String,
    pub assumptions_hold: bool,
    pub findings: Vec<String>,
    pub demand_bound: f64,
    pub firms_bound: f64,
    pub uniqueness: &'static str,
    pub margin: Option<f64>,
    pub witness: Option<WitnessRecord>,
}

pub fn check(loaded: &Loaded) -> CheckReport {
    let model = &loaded.model;
    let bounds = uniqueness_bounds(model);
    let verdict = check_uniqueness(&model.behavior, bounds);
    let (uniqueness, margin, witness) = match verdict {
        UniquenessVerdict::Satisfied { margin } => ("satisfied", Some(margin), None),
        UniquenessVerdict::Violated(w) => (
            "violated",
            None,
            Some(WitnessRecord {
                destination: model.network.destinations()[w.destination],
                condition: match w.condition {
                    Condition::TravelerSide => "traveler side",
                    Condition::FirmSide => "firm side",
                },
                demand: w.demand,
                firms: w.firms,
                value: w.value,
            }),
        ),
        UniquenessVerdict::Indeterminate => ("indeterminate", None, None),
    };
    CheckReport {
        command: "check",
        scenario: loaded.name.clone(),
        assumptions_hold: validate_assumptions(&model.behavior).is_valid(),
        findings: warnings(loaded),
        demand_bound: bounds.demand_max,
        firms_bound: bounds.firms_max,
        uniqueness,
        margin,
        witness,
    }
}

impl CheckReport {
    pub fn text(&self) -> String {
        let mut out = format!(
            "checks: {}\nassumptions: {}\n{}uniqueness over d <= {}, h <= {}: {}",
            self.scenario,
            if self.assumptions_hold { "hold" } else { "violated" },
            warning_lines(&self.findings),
            num(self.demand_bound),
            num(self.firms_bound),
            self.uniqueness
        );
        if let Some(m) = self.margin {
            out += &format!(" (margin {})", num(m));
        }
        out += "\n";
        if let Some(w) = &self.witness {
            out += &format!(
                "witness: center {}, {} condition = {} at d = {}, h = {}\n",
                w.destination,
                w.condition,
                num(w.value),
                num(w.demand),
                num(w.firms)
            );
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub command: &'static str,
    pub scenario: String,
    pub resolution: usize,
    pub cell: f64,
    pub points: u64,
    pub grid_coordinates: Vec<f64>,
    pub solver_coordinates: Vec<f64>,
    pub grid_residual: f64,
    pub coordinate_distance: f64,
    pub within_one_cell: bool,
    pub grid_minimum: f64,
    pub lipschitz_slack: f64,
    pub optimum_objective: f64,
    pub optimum_within_slack: bool,
}

pub fn oracle(loaded: &Loaded) -> Result<OracleReport, Failure> {
    let model = &loaded.model;
    let grid = loaded.scenario.grid()?;
    let eq = grid_equilibrium(model, &grid)?;
    let best = grid_optimum(model, &grid, &Objective::Overall)?;
    let (state, _) = solve_combined(model, &loaded.config)?;
    let so = solve_overall_so(model, &loaded.config, &loaded.scenario.search())?;
    let solver_coordinates = share_coordinates(model, &state, true);
    let coordinate_distance = solver_coordinates
        .iter()
        .zip(&eq.coordinates)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(OracleReport {
        command: "oracle",
        scenario: loaded.name.clone(),
        resolution: grid.resolution,
        cell: grid.cell(),
        points: eq.points,
        grid_coordinates: eq.coordinates,
        solver_coordinates,
        grid_residual: eq.residual,
        coordinate_distance,
        within_one_cell: coordinate_distance <= grid.cell(),
        grid_minimum: best.value,
        lipschitz_slack: best.slack,
        optimum_objective: so.objective,
        optimum_within_slack: so.objective <= best.value + best.slack,
    })
}

impl OracleReport {
    pub fn text(&self) -> String {
        let coords = |v: &[f64]| v.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" ");
        format!(
            "oracle comparison: {} ({} points per coordinate, {} points)\n\n{}",
            self.scenario,
            self.resolution,
            self.points,
            table(
                &["check", "solver", "grid", "allowance", "agrees"],
                &[
                    vec![
                        "equilibrium shares".into(),
                        coords(&self.solver_coordinates),
                        coords(&self.grid_coordinates),
                        num(self.cell),
                        self.within_one_cell.to_string()
                    ],
                    vec![
                        "overall optimum".into(),
                        num(self.optimum_objective),
                        num(self.grid_minimum),
                        num(self.lipschitz_slack),
                        self.optimum_within_slack.to_string()
                    ],
                ],
            )
        )
    }
}
