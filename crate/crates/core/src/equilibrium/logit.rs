//! Logit choice maps. Every softmax is shifted by its largest score so that
//! no exponent is positive.

use crate::math::{exp, ln};

/// Log-sum expected travel time `-(1/alpha) ln sum_j exp(-alpha c_j)`.
///
/// Never exceeds the cheapest route cost.
pub fn expected_time(costs: &[f64], dispersion: f64) -> f64 {
    let min = costs.iter().copied().fold(f64::INFINITY, f64::min);
    let sum: f64 = costs.iter().map(|&c| exp(-dispersion * (c - min))).sum();
    min - ln(sum) / dispersion
}

/// Splits `total` across choices in proportion to `exp(score)`.
pub fn softmax_into(scores: &[f64], total: f64, out: &mut [f64]) {
    debug_assert_eq!(scores.len(), out.len());
    if total == 0.0 {
        out.fill(0.0);
        return;
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for (o, &s) in out.iter_mut().zip(scores) {
        *o = exp(s - max);
        sum += *o;
    }
    let scale = total / sum;
    for o in out.iter_mut() {
        *o *= scale;
    }
}

/// Route flows of one OD pair: `q exp(-alpha c_k) / sum_j exp(-alpha c_j)`.
pub fn route_choice(demand: f64, costs: &[f64], dispersion: f64, out: &mut [f64]) {
    let scores: alloc::vec::Vec<f64> = costs.iter().map(|&c| -dispersion * c).collect();
    softmax_into(&scores, demand, out);
}

/// OD demands of one origin from expected times and destination utilities:
/// `O exp(-gamma (v_s - A_s)) / sum_j exp(-gamma (v_j - A_j))`.
pub fn destination_choice(origin_demand: f64, expected: &[f64], attraction: &[f64], dispersion: f64, out: &mut [f64]) {
    let scores: alloc::vec::Vec<f64> = expected
        .iter()
        .zip(attraction)
        .map(|(&v, &a)| -dispersion * (v - a))
        .collect();
    softmax_into(&scores, origin_demand, out);
}

/// Firm distribution `T exp(beta B_s) / sum_j exp(beta B_j)`.
pub fn location_choice(business: &[f64], total: f64, dispersion: f64, out: &mut [f64]) {
    let scores: alloc::vec::Vec<f64> = business.iter().map(|&b| dispersion * b).collect();
    softmax_into(&scores, total, out);
}
