//! Demand sweep: untolled equilibrium against the priced overall optimum
//! for a sequence of origin demands.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use bizland_core::pricing::{
    extract_pricing, social_cost_total, solve_overall_so, solve_uniform_road_pricing, verify_support,
};
use bizland_core::{solve_combined, CombinedState, EquilibriumConfig, Model};
use serde::Serialize;

use crate::report::{num, opt, table, ChargesRecord};
use crate::scenario::Loaded;
use crate::Failure;

/// Environment variable holding the number of sweep workers.
pub const WORKERS_ENV: &str = "BIZLAND_WORKERS";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub scenario: usize,
    pub demands: Vec<f64>,
    pub untolled_cost: f64,
    pub priced_cost: f64,
    /// `100 (1 - priced / untolled)`, absent when the untolled cost is not positive.
    pub descending_percentage: Option<f64>,
    pub untolled_traveler_cost: f64,
    /// Traveler social cost under road pricing with firms responding.
    pub road_priced_traveler_cost: f64,
    pub od_untolled: Vec<f64>,
    pub od_priced: Vec<f64>,
    pub demand_untolled: Vec<f64>,
    pub demand_priced: Vec<f64>,
    pub firms_untolled: Vec<f64>,
    pub firms_priced: Vec<f64>,
    pub firm_spread_untolled: f64,
    pub firm_spread_priced: f64,
    pub charges: ChargesRecord,
    pub support_holds: bool,
    pub support_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub command: &'static str,
    pub scenario: String,
    pub rows: Vec<SweepRow>,
    pub all_percentages_nonnegative: bool,
    pub road_pricing_never_worse: bool,
    pub note: &'static str,
}

const NOTE: &str = "percentages are properties of the parameters in this scenario; no particular value is expected";

fn spread(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max) - v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn run_one(loaded: &Loaded, k: usize, demands: &[f64], config: &EquilibriumConfig) -> Result<SweepRow, Failure> {
    let model: Model = loaded.model.with_demands(demands)?;
    let search = loaded.scenario.search();
    let (untolled, _) = solve_combined(&model, config)?;
    let optimum = solve_overall_so(&model, config, &search)?;
    let scheme = extract_pricing(&model, &optimum.state);
    let support = verify_support(&model, &scheme, config)?;
    let road = solve_uniform_road_pricing(&model, config, &search)?;
    let u = social_cost_total(&model, &untolled);
    let p = social_cost_total(&model, &optimum.state);
    let firms = |s: &CombinedState| s.firms.clone();
    Ok(SweepRow {
        scenario: k,
        demands: demands.to_vec(),
        untolled_cost: u.total,
        priced_cost: p.total,
        descending_percentage: (u.total > 0.0).then(|| 100.0 * (1.0 - p.total / u.total)),
        untolled_traveler_cost: u.travelers,
        road_priced_traveler_cost: road.objective,
        od_untolled: untolled.od_demand.clone(),
        od_priced: optimum.state.od_demand.clone(),
        demand_untolled: untolled.dest_demand.clone(),
        demand_priced: optimum.state.dest_demand.clone(),
        firm_spread_untolled: spread(&untolled.firms),
        firm_spread_priced: spread(&optimum.state.firms),
        firms_untolled: firms(&untolled),
        firms_priced: firms(&optimum.state),
        charges: ChargesRecord::new(&model, &scheme.charges),
        support_holds: support.holds,
        support_distance: support.state_distance,
    })
}

/// Worker count from the environment, else the available parallelism.
pub fn workers_from_env() -> Result<usize, Failure> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Failure::Validation(format!("{WORKERS_ENV} must be a positive integer, got `{v}`"))),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}

pub fn run_sweep(loaded: &Loaded, workers: usize) -> Result<SweepReport, Failure> {
    let sweep = loaded
        .scenario
        .sweep
        .as_ref()
        .ok_or_else(|| Failure::Validation("scenario has no [sweep] section".into()))?;
    let count = sweep.count;
    let next = AtomicUsize::new(1);
    let results: Mutex<Vec<Option<Result<SweepRow, Failure>>>> = Mutex::new((0..count).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers.clamp(1, count) {
            scope.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                if k > count {
                    break;
                }
                let row = run_one(loaded, k, &sweep.demands(k), &loaded.config)
                    .map_err(|e| e.context(&format!("scenario {k}")));
                results.lock().expect("no worker panics while holding the lock")[k - 1] = Some(row);
            });
        }
    });
    let rows = results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every scenario ran"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepReport {
        command: "sweep",
        scenario: loaded.name.clone(),
        all_percentages_nonnegative: rows.iter().all(|r| r.descending_percentage.is_some_and(|p| p >= 0.0)),
        road_pricing_never_worse: rows.iter().all(|r| r.road_priced_traveler_cost <= r.untolled_traveler_cost),
        rows,
        note: NOTE,
    })
}

impl SweepReport {
    pub fn text(&self) -> String {
        let list = |v: &[f64]| v.iter().map(|&x| format!("{x:.3}")).collect::<Vec<_>>().join("/");
        let mut out = format!("demand sweep: {}\n\n", self.scenario);
        out += &table(
            &[
                "k",
                "demands",
                "untolled",
                "priced",
                "descending %",
                "travelers untolled",
                "travelers road-priced",
                "support",
            ],
            &self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.scenario.to_string(),
                        list(&r.demands),
                        num(r.untolled_cost),
                        num(r.priced_cost),
                        opt(r.descending_percentage),
                        num(r.untolled_traveler_cost),
                        num(r.road_priced_traveler_cost),
                        if r.support_holds { "holds" } else { "fails" }.to_string(),
                    ]
                })
                .collect::<Vec<_>>(),
        );
        out += "\ndistributions (untolled | priced)\n";
        out += &table(
            &["k", "od demand", "center demand", "firms", "firm spread"],
            &self
                .rows
                .iter()
                .map(|r| {
                    vec![
                        r.scenario.to_string(),
                        format!("{} | {}", list(&r.od_untolled), list(&r.od_priced)),
                        format!("{} | {}", list(&r.demand_untolled), list(&r.demand_priced)),
                        format!("{} | {}", list(&r.firms_untolled), list(&r.firms_priced)),
                        format!("{:.3} | {:.3}", r.firm_spread_untolled, r.firm_spread_priced),
                    ]
                })
                .collect::<Vec<_>>(),
        );
        out += "\nprices at the optimum (link tolls; entrance fees; business taxes)\n";
        out += &table(
            &["k", "tolls", "fees", "taxes"],
            &self
                .rows
                .iter()
                .map(|r| {
                    let c = &r.charges;
                    vec![
                        r.scenario.to_string(),
                        list(&c.links.iter().map(|l| l.toll).collect::<Vec<_>>()),
                        list(&c.destinations.iter().map(|d| d.entrance_fee).collect::<Vec<_>>()),
                        list(&c.destinations.iter().map(|d| d.business_tax).collect::<Vec<_>>()),
                    ]
                })
                .collect::<Vec<_>>(),
        );
        out += &format!(
            "\nall descending percentages nonnegative: {}\nroad pricing never raises traveler cost: {}\nnote: {}\n",
            self.all_percentages_nonnegative, self.road_pricing_never_worse, self.note
        );
        out
    }
}
