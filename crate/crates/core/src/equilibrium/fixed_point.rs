//! Fixed-point search for `z = G(z)` on small dense problems.
//!
//! Each iteration tries a Newton step on `z - G(z)` with a forward-difference
//! Jacobian and backtracking on the Euclidean residual; when that fails the
//! iteration falls back to a damped step `z + step (G(z) - z)`.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};

use super::Damping;
use crate::math::sup_norm;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub(crate) struct Options {
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: Damping,
    pub oscillation_window: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Outcome {
    pub z: Vec<f64>,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

const ARMIJO: f64 = 1e-4;
const MAX_HALVINGS: usize = 12;

fn scaled_residual(z: &[f64], g: &[f64]) -> f64 {
    let r = z.iter().zip(g).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
    r / sup_norm(z).max(1.0)
}

fn norm2(z: &[f64], g: &[f64]) -> f64 {
    libm::sqrt(z.iter().zip(g).map(|(a, b)| (a - b) * (a - b)).sum())
}

pub(crate) fn solve<F>(mut map: F, mut z: Vec<f64>, opts: &Options) -> Result<Outcome>
where
    F: FnMut(&[f64], &mut [f64]),
{
    let n = z.len();
    let mut g = vec![0.0; n];
    map(&z, &mut g);
    let mut trace = Vec::new();
    let mut fallbacks = 0usize;
    let mut trial = vec![0.0; n];
    let mut g_trial = vec![0.0; n];
    let mut column = vec![0.0; n];

    for iteration in 0.. {
        let residual = scaled_residual(&z, &g);
        trace.push(residual);
        if residual < opts.tolerance {
            return Ok(Outcome {
                z,
                iterations: iteration,
                trace,
            });
        }
        if !residual.is_finite() || iteration >= opts.max_iterations {
            return Err(Error::NotConverged {
                iterations: iteration,
                residual,
                trace,
            });
        }
        let w = opts.oscillation_window;
        if w > 0 && trace.len() > w {
            let anchor = trace[trace.len() - 1 - w];
            let recent = trace[trace.len() - w..].iter().copied().fold(f64::INFINITY, f64::min);
            if recent >= anchor {
                return Err(Error::OscillationDetected {
                    iterations: iteration,
                    residual,
                    trace,
                });
            }
        }

        // Newton on Phi(z) = z - G(z): (I - J) delta = G(z) - z.
        let mut jac = DMatrix::<f64>::identity(n, n);
        for j in 0..n {
            let step = 1e-7 * z[j].abs().max(1.0);
            trial.copy_from_slice(&z);
            trial[j] += step;
            map(&trial, &mut column);
            for i in 0..n {
                jac[(i, j)] -= (column[i] - g[i]) / step;
            }
        }
        let rhs = DVector::from_iterator(n, g.iter().zip(&z).map(|(a, b)| a - b));
        let mut accepted = false;
        if let Some(delta) = jac.lu().solve(&rhs) {
            if delta.iter().all(|d| d.is_finite()) {
                let merit = norm2(&z, &g);
                let mut t = 1.0;
                for _ in 0..MAX_HALVINGS {
                    for i in 0..n {
                        trial[i] = z[i] + t * delta[i];
                    }
                    map(&trial, &mut g_trial);
                    if norm2(&trial, &g_trial) <= (1.0 - ARMIJO * t) * merit {
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
            }
        }
        if accepted {
            core::mem::swap(&mut z, &mut trial);
            core::mem::swap(&mut g, &mut g_trial);
        } else {
            fallbacks += 1;
            let step = opts.damping.step(fallbacks);
            for i in 0..n {
                z[i] += step * (g[i] - z[i]);
            }
            map(&z, &mut g);
        }
    }
    unreachable!()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> Options {
        Options {
            tolerance: 1e-12,
            max_iterations: 100,
            damping: Damping::Fixed(0.5),
            oscillation_window: 20,
        }
    }

    #[test]
    fn finds_fixed_point_of_cosine() {
        let out = solve(|z, g| g[0] = libm::cos(z[0]), vec![0.0], &opts()).unwrap();
        assert!((out.z[0] - 0.739_085_133_215_160_6).abs() < 1e-12);
        assert!(out.iterations < 10);
    }

    #[test]
    fn expansive_linear_map_still_converges() {
        // G(z) = -3 z + 4 has fixed point 1 but plain iteration diverges.
        let out = solve(|z, g| g[0] = -3.0 * z[0] + 4.0, vec![10.0], &opts()).unwrap();
        assert!((out.z[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reports_non_convergence() {
        // G(z) = z + 1 has no fixed point.
        let err = solve(|z, g| g[0] = z[0] + 1.0, vec![0.0], &opts()).unwrap_err();
        assert!(matches!(
            err,
            Error::NotConverged { .. } | Error::OscillationDetected { .. }
        ));
    }
}
