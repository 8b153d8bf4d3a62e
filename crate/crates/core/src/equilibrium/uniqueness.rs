//! Sufficient conditions for a unique combined equilibrium.
//!
//! For every destination and every reachable `(d, h)`:
//!
//! 1. `dA/dd + dA/dh / 2 + dB/dd / 2 < 0`
//! 2. `dB/dh + dB/dd / 2 + dA/dh / 2 < 0`
//!
//! With the closed-form attraction families each expression is a sum of a
//! term monotone in `d` and a term monotone in `h`, so its maximum over the
//! box `[0, d_max] x [0, h_max]` sits at a corner.

use crate::{Behavior, Model};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateBounds {
    pub demand_max: f64,
    pub firms_max: f64,
}

/// `d in [0, total origin demand]`, `h in [0, total firms]`.
pub fn uniqueness_bounds(model: &Model) -> StateBounds {
    StateBounds {
        demand_max: model.network.total_demand(),
        firms_max: model.network.total_firms(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Crowding outweighs the pull of firms for travelers.
    TravelerSide,
    /// Rivalry outweighs the pull of customers for firms.
    FirmSide,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub destination: usize,
    pub condition: Condition,
    pub demand: f64,
    pub firms: f64,
    /// Value of the violated expression (non-negative).
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UniquenessVerdict {
    /// Both conditions hold everywhere; `margin` is the largest expression value (< 0).
    Satisfied { margin: f64 },
    /// The worst violation found.
    Violated(Witness),
    Indeterminate,
}

/// Value of the two condition expressions at one point.
pub fn condition_values(behavior: &Behavior, s: usize, d: f64, h: f64) -> (f64, f64) {
    let v = behavior.attraction(s, d, h);
    (
        v.trip_dd + 0.5 * v.trip_dh + 0.5 * v.business_dd,
        v.business_dh + 0.5 * v.business_dd + 0.5 * v.trip_dh,
    )
}

pub fn check_uniqueness(behavior: &Behavior, bounds: StateBounds) -> UniquenessVerdict {
    let StateBounds { demand_max, firms_max } = bounds;
    if !(demand_max >= 0.0 && firms_max >= 0.0 && demand_max.is_finite() && firms_max.is_finite()) {
        return UniquenessVerdict::Indeterminate;
    }
    let corners = [
        (0.0, 0.0),
        (demand_max, 0.0),
        (0.0, firms_max),
        (demand_max, firms_max),
    ];
    let mut worst: Option<Witness> = None;
    for s in 0..behavior.destinations.len() {
        for &(d, h) in &corners {
            let (c1, c2) = condition_values(behavior, s, d, h);
            for (condition, value) in [(Condition::TravelerSide, c1), (Condition::FirmSide, c2)] {
                if value.is_nan() {
                    return UniquenessVerdict::Indeterminate;
                }
                if worst.map_or(true, |w| value > w.value) {
                    worst = Some(Witness {
                        destination: s,
                        condition,
                        demand: d,
                        firms: h,
                        value,
                    });
                }
            }
        }
    }
    match worst {
        None => UniquenessVerdict::Indeterminate,
        Some(w) if w.value < 0.0 => UniquenessVerdict::Satisfied { margin: w.value },
        Some(w) => UniquenessVerdict::Violated(w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::behavior::{Attraction, BusinessAttraction, LinkTime, TripAttraction};
    use alloc::vec;

    fn behavior(firm_gain: f64, crowding: f64, customer_gain: f64, rivalry: f64) -> Behavior {
        Behavior {
            links: vec![LinkTime {
                free_flow: 1.0,
                coefficient: 1.0,
                power: 1.0,
            }],
            destinations: vec![Attraction {
                trip: TripAttraction {
                    base: 0.0,
                    firm_gain,
                    crowding,
                    crowding_quadratic: 0.01,
                },
                business: BusinessAttraction {
                    base: 0.0,
                    customer_gain,
                    rivalry,
                },
            }],
        }
    }

    const BOX: StateBounds = StateBounds {
        demand_max: 100.0,
        firms_max: 50.0,
    };

    #[test]
    fn strong_congestion_is_satisfied() {
        let v = check_uniqueness(&behavior(0.2, 3.0, 0.1, 2.0), BOX);
        assert!(matches!(v, UniquenessVerdict::Satisfied { margin } if margin < 0.0));
    }

    #[test]
    fn strong_agglomeration_is_violated_with_witness() {
        let b = behavior(10.0, 0.01, 10.0, 0.01);
        let UniquenessVerdict::Violated(w) = check_uniqueness(&b, BOX) else {
            panic!("expected a violation");
        };
        // Worst corner: no firms, no crowding.
        assert_eq!((w.demand, w.firms), (0.0, 0.0));
        let v = b.attraction(0, w.demand, w.firms);
        let direct = match w.condition {
            Condition::TravelerSide => v.trip_dd + 0.5 * v.trip_dh + 0.5 * v.business_dd,
            Condition::FirmSide => v.business_dh + 0.5 * v.business_dd + 0.5 * v.trip_dh,
        };
        assert_eq!(direct, w.value);
        assert!(w.value >= 0.0);
    }

    #[test]
    fn bad_bounds_are_indeterminate() {
        let b = behavior(0.2, 3.0, 0.1, 2.0);
        let bounds = StateBounds {
            demand_max: f64::NAN,
            firms_max: 1.0,
        };
        assert_eq!(check_uniqueness(&b, bounds), UniquenessVerdict::Indeterminate);
    }
}
