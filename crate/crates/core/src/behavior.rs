//! Link travel times, trip and business attraction functions, their first
//! partials, and the externality-adjusted functions that appear in the
//! optimality conditions of the two system-optimum problems.
//!
//! All quantities share one unit of generalized cost; there is no
//! money/time conversion.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::math::{ln_1p, powf};
use crate::{Error, Result};

/// `t(x) = free_flow + coefficient * x^power`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkTime {
    pub free_flow: f64,
    pub coefficient: f64,
    pub power: f64,
}

impl LinkTime {
    pub fn time(&self, x: f64) -> f64 {
        self.free_flow + self.coefficient * powf(x, self.power)
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.coefficient * self.power * powf(x, self.power - 1.0)
    }

    /// Delay a marginal traveler imposes on everyone else: `x t'(x)`.
    pub fn marginal(&self, x: f64) -> f64 {
        self.coefficient * self.power * powf(x, self.power)
    }

    /// Marginal social travel time `t(x) + x t'(x)`.
    pub fn adjusted(&self, x: f64) -> f64 {
        self.time(x) + self.marginal(x)
    }
}

/// Traveler-side attraction
/// `A(d, h) = base + firm_gain ln(1 + h) - crowding d - crowding_quadratic d^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TripAttraction {
    pub base: f64,
    pub firm_gain: f64,
    pub crowding: f64,
    pub crowding_quadratic: f64,
}

/// Firm-side attraction `B(d, h) = base + customer_gain d - rivalry h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BusinessAttraction {
    pub base: f64,
    pub customer_gain: f64,
    pub rivalry: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attraction {
    pub trip: TripAttraction,
    pub business: BusinessAttraction,
}

/// Values and first partials of both attraction functions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttractionValues {
    pub trip: f64,
    pub trip_dd: f64,
    pub trip_dh: f64,
    pub business: f64,
    pub business_dd: f64,
    pub business_dh: f64,
}

impl Attraction {
    pub fn eval(&self, d: f64, h: f64) -> AttractionValues {
        let t = &self.trip;
        let b = &self.business;
        AttractionValues {
            trip: t.base + t.firm_gain * ln_1p(h) - t.crowding * d - t.crowding_quadratic * d * d,
            trip_dd: -t.crowding - 2.0 * t.crowding_quadratic * d,
            trip_dh: t.firm_gain / (1.0 + h),
            business: b.base + b.customer_gain * d - b.rivalry * h,
            business_dd: b.customer_gain,
            business_dh: -b.rivalry,
        }
    }
}

impl AttractionValues {
    /// Trip attraction net of the crowding externality, `A + d dA/dd`.
    pub fn trip_adjusted(&self, d: f64) -> f64 {
        self.trip + d * self.trip_dd
    }

    /// `A + d dA/dd + h dB/dd`: also credits the business benefit a traveler brings.
    pub fn trip_overall(&self, d: f64, h: f64) -> f64 {
        self.trip + d * self.trip_dd + h * self.business_dd
    }

    /// `B + d dA/dh + h dB/dh`.
    pub fn business_overall(&self, d: f64, h: f64) -> f64 {
        self.business + d * self.trip_dh + h * self.business_dh
    }
}

/// Dispersion parameters of the nested logit (routes below destinations)
/// and of the firms' location logit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogitParams {
    route: f64,
    location: f64,
    destination: f64,
}

impl LogitParams {
    /// Rejects non-positive dispersions and `route < destination`, which
    /// would break the nesting.
    pub fn new(route: f64, location: f64, destination: f64) -> Result<Self> {
        for (name, v) in [("route", route), ("location", location), ("destination", destination)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidLogit(format!("{name} dispersion must be positive, got {v}")));
            }
        }
        if route < destination {
            return Err(Error::InvalidLogit(format!(
                "route dispersion ({route}) must be at least the destination dispersion ({destination}) (alpha >= gamma)"
            )));
        }
        Ok(Self {
            route,
            location,
            destination,
        })
    }

    /// Route-choice dispersion (alpha).
    pub fn route(&self) -> f64 {
        self.route
    }

    /// Firm location dispersion (beta).
    pub fn location(&self) -> f64 {
        self.location
    }

    /// Destination-choice dispersion (gamma).
    pub fn destination(&self) -> f64 {
        self.destination
    }

    /// Weight `1/gamma - 1/alpha` of the OD entropy term.
    pub fn nest_weight(&self) -> f64 {
        1.0 / self.destination - 1.0 / self.route
    }
}

/// Fixed per-unit charges: link tolls, destination entrance fees and
/// per-firm business taxes. Negative entries are subsidies.
#[derive(Debug, Clone, PartialEq)]
pub struct Charges {
    pub link_toll: Vec<f64>,
    pub entrance_fee: Vec<f64>,
    pub business_tax: Vec<f64>,
}

impl Charges {
    pub fn zero(links: usize, destinations: usize) -> Self {
        Self {
            link_toll: alloc::vec![0.0; links],
            entrance_fee: alloc::vec![0.0; destinations],
            business_tax: alloc::vec![0.0; destinations],
        }
    }
}

/// Which cost functions the agents respond to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regime<'a> {
    /// Actual travel times and attractions.
    Untolled,
    /// Travelers see `t + x t'` and `A + d dA/dd`; firms see `B`.
    RoadPricing,
    /// Every externality internalized: `t + x t'`, `A + d dA/dd + h dB/dd`,
    /// `B + d dA/dh + h dB/dh`.
    SystemOptimum,
    /// Actual functions shifted by fixed charges.
    Priced(&'a Charges),
}

/// Link-time and attraction parameters of a whole network.
#[derive(Debug, Clone, PartialEq)]
pub struct Behavior {
    pub links: Vec<LinkTime>,
    pub destinations: Vec<Attraction>,
}

impl Behavior {
    pub fn link_time(&self, a: usize, x: f64) -> Result<f64> {
        check_flow(a, x)?;
        Ok(self.links[a].time(x))
    }

    pub fn link_time_marginal(&self, a: usize, x: f64) -> Result<f64> {
        check_flow(a, x)?;
        Ok(self.links[a].marginal(x))
    }

    pub fn attraction(&self, s: usize, d: f64, h: f64) -> AttractionValues {
        self.destinations[s].eval(d, h)
    }

    /// Link cost perceived under `regime`; `x` must be nonnegative.
    pub fn link_cost(&self, regime: Regime<'_>, a: usize, x: f64) -> f64 {
        let link = &self.links[a];
        match regime {
            Regime::Untolled => link.time(x),
            Regime::RoadPricing | Regime::SystemOptimum => link.adjusted(x),
            Regime::Priced(c) => link.time(x) + c.link_toll[a],
        }
    }

    /// (traveler utility, firm utility) of destination `s` under `regime`.
    pub fn destination_utilities(&self, regime: Regime<'_>, s: usize, d: f64, h: f64) -> (f64, f64) {
        let v = self.attraction(s, d, h);
        match regime {
            Regime::Untolled => (v.trip, v.business),
            Regime::RoadPricing => (v.trip_adjusted(d), v.business),
            Regime::SystemOptimum => (v.trip_overall(d, h), v.business_overall(d, h)),
            Regime::Priced(c) => (v.trip - c.entrance_fee[s], v.business - c.business_tax[s]),
        }
    }
}

fn check_flow(link: usize, x: f64) -> Result<()> {
    if x < 0.0 {
        Err(Error::NegativeFlow { link, value: x })
    } else {
        Ok(())
    }
}

/// `t + x t'` per link and `A + d dA/dd` per destination at `state`.
pub fn adjusted_traffic_functions(
    behavior: &Behavior,
    state: &crate::CombinedState,
) -> (Vec<f64>, Vec<f64>) {
    let links = behavior
        .links
        .iter()
        .zip(&state.link_flow)
        .map(|(l, &x)| l.adjusted(x))
        .collect();
    let dests = (0..behavior.destinations.len())
        .map(|s| {
            let d = state.dest_demand[s];
            behavior.attraction(s, d, state.firms[s]).trip_adjusted(d)
        })
        .collect();
    (links, dests)
}

/// Fully adjusted link, traveler and firm functions at `state`.
#[derive(Debug, Clone, PartialEq)]
pub struct OverallAdjusted {
    pub link: Vec<f64>,
    pub trip: Vec<f64>,
    pub business: Vec<f64>,
}

pub fn adjusted_overall_functions(behavior: &Behavior, state: &crate::CombinedState) -> OverallAdjusted {
    let link = behavior
        .links
        .iter()
        .zip(&state.link_flow)
        .map(|(l, &x)| l.adjusted(x))
        .collect();
    let (mut trip, mut business) = (Vec::new(), Vec::new());
    for s in 0..behavior.destinations.len() {
        let (d, h) = (state.dest_demand[s], state.firms[s]);
        let v = behavior.attraction(s, d, h);
        trip.push(v.trip_overall(d, h));
        business.push(v.business_overall(d, h));
    }
    OverallAdjusted { link, trip, business }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subject {
    Link(usize),
    Destination(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    FreeFlowPositive,
    TimeStrictlyIncreasing,
    TimeConvex,
    TripDecreasingInDemand,
    TripIncreasingInFirms,
    TripConcaveInDemand,
    TripStrictlyConcaveInDemand,
    BusinessIncreasingInDemand,
    BusinessDecreasingInFirms,
    NonFinite,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FreeFlowPositive => "free-flow time must be positive",
            Self::TimeStrictlyIncreasing => "travel time must be strictly increasing in flow (coefficient > 0)",
            Self::TimeConvex => "travel time must be convex in flow (power >= 1)",
            Self::TripDecreasingInDemand => "trip attraction must be strictly decreasing of d_s (crowding > 0)",
            Self::TripIncreasingInFirms => "trip attraction must be strictly increasing of h_s (firm gain > 0)",
            Self::TripConcaveInDemand => "trip attraction must be concave in d_s (quadratic crowding >= 0)",
            Self::TripStrictlyConcaveInDemand => {
                "trip attraction is only weakly concave in d_s (quadratic crowding = 0)"
            }
            Self::BusinessIncreasingInDemand => {
                "business attraction must be strictly increasing of d_s (customer gain > 0)"
            }
            Self::BusinessDecreasingInFirms => "business attraction must be strictly decreasing of h_s (rivalry > 0)",
            Self::NonFinite => "parameter is not finite",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Finding {
    pub subject: Subject,
    pub rule: Rule,
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.subject {
            Subject::Link(a) => write!(f, "link {a}: {}", self.rule),
            Subject::Destination(s) => write!(f, "destination {s}: {}", self.rule),
        }
    }
}

/// Outcome of the sign/shape checks on the parameters. Weak concavity of
/// the trip attraction is only a warning.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AssumptionReport {
    pub violations: Vec<Finding>,
    pub warnings: Vec<Finding>,
}

impl AssumptionReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self) -> String {
        let mut out = String::new();
        for v in &self.violations {
            out += &format!("violation: {v}\n");
        }
        for w in &self.warnings {
            out += &format!("warning: {w}\n");
        }
        out
    }
}

/// Checks the monotonicity, convexity and concavity requirements on the
/// closed-form families by inspecting parameter signs.
pub fn validate_assumptions(behavior: &Behavior) -> AssumptionReport {
    let mut report = AssumptionReport::default();
    let mut fail = |subject, rule| report.violations.push(Finding { subject, rule });
    for (a, l) in behavior.links.iter().enumerate() {
        let subject = Subject::Link(a);
        if ![l.free_flow, l.coefficient, l.power].iter().all(|v| v.is_finite()) {
            fail(subject, Rule::NonFinite);
            continue;
        }
        if l.free_flow <= 0.0 {
            fail(subject, Rule::FreeFlowPositive);
        }
        if l.coefficient <= 0.0 {
            fail(subject, Rule::TimeStrictlyIncreasing);
        }
        if l.power < 1.0 {
            fail(subject, Rule::TimeConvex);
        }
    }
    let mut warnings = Vec::new();
    for (s, attr) in behavior.destinations.iter().enumerate() {
        let subject = Subject::Destination(s);
        let (t, b) = (&attr.trip, &attr.business);
        let all = [
            t.base,
            t.firm_gain,
            t.crowding,
            t.crowding_quadratic,
            b.base,
            b.customer_gain,
            b.rivalry,
        ];
        if !all.iter().all(|v| v.is_finite()) {
            fail(subject, Rule::NonFinite);
            continue;
        }
        if t.crowding <= 0.0 {
            fail(subject, Rule::TripDecreasingInDemand);
        }
        if t.firm_gain <= 0.0 {
            fail(subject, Rule::TripIncreasingInFirms);
        }
        if t.crowding_quadratic < 0.0 {
            fail(subject, Rule::TripConcaveInDemand);
        } else if t.crowding_quadratic == 0.0 {
            warnings.push(Finding {
                subject,
                rule: Rule::TripStrictlyConcaveInDemand,
            });
        }
        if b.customer_gain <= 0.0 {
            fail(subject, Rule::BusinessIncreasingInDemand);
        }
        if b.rivalry <= 0.0 {
            fail(subject, Rule::BusinessDecreasingInFirms);
        }
    }
    report.warnings = warnings;
    report
}
