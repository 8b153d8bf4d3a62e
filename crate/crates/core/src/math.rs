//! Thin wrappers over `libm` so the numeric code reads like `std` floats.

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn powf(x: f64, p: f64) -> f64 {
    libm::pow(x, p)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

/// `x (ln x - 1)` with the `x ln x -> 0` convention at zero; positive
/// arguments are floored at `floor` inside the logarithm.
#[inline]
pub(crate) fn entropy_term(x: f64, floor: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * (ln(x.max(floor)) - 1.0)
    }
}

pub(crate) fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}
