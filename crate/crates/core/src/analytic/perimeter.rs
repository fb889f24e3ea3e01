//! Second moment of the hull perimeter,
//!
//! ```text
//! E(ℓ₁²) = 4π ∫_{−π/2}^{π/2} dθ ∫_0^∞ du  cos θ · cosh(uθ)/sinh(uπ/2) · tanh((2θ + π)u/4).
//! ```
//!
//! For fixed `θ` the inner integrand decays like `e^{−u(π/2 − |θ|)}`, so the
//! inner integral is computed in the rescaled variable `v = u·(π/2 − |θ|)`
//! over `[0, C]`, i.e. `u` is truncated at `U(θ) = C / (π/2 − |θ|)`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_pieces, QuadOptions};

/// Truncation constant: the inner tail beyond `U(θ)` is at most `2e^{−C}/(1 − e^{−πU})`.
pub const U_SCALE: f64 = 45.0;

/// The integrand, including its limit `cos θ · (2θ + π)/(2π)` at `u = 0`.
pub fn perimeter_sq_integrand(theta: f64, u: f64) -> f64 {
    let c = theta.cos();
    if u == 0.0 {
        return c * (2.0 * theta + PI) / (2.0 * PI);
    }
    // cosh(uθ)/sinh(uπ/2) rewritten without overflow
    let t = theta.abs();
    let ratio = ((u * (t - FRAC_PI_2)).exp() + (-u * (t + FRAC_PI_2)).exp()) / (-(-PI * u).exp_m1());
    c * ratio * ((2.0 * theta + PI) * u / 4.0).tanh()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerimeterSqResult {
    pub value: f64,
    pub abs_error: f64,
    /// Bound on the part of the error due to truncating `u`.
    pub truncation_error: f64,
    pub evaluations: usize,
}

fn inner(theta: f64, abs_tol: f64, evaluations: &mut usize) -> Result<f64> {
    let eps = FRAC_PI_2 - theta.abs();
    if eps <= 0.0 {
        return Err(Error::Domain(format!("θ = {theta} outside (−π/2, π/2)")));
    }
    // v = u·eps; features sit at u ≈ 1 (v ≈ eps) and decay over v ≈ 1
    let f = |v: f64| perimeter_sq_integrand(theta, v / eps) / eps;
    let mut breaks = vec![0.0];
    if eps < 0.5 {
        breaks.extend([eps, 4.0 * eps].into_iter().filter(|&b| b < 1.0));
    }
    breaks.extend([1.0, 5.0, 15.0, U_SCALE]);
    let r = integrate_pieces(f, &breaks, QuadOptions { abs_tol, max_intervals: 4000 })?;
    *evaluations += r.evaluations;
    Ok(r.value)
}

/// Nested adaptive evaluation of `E(ℓ₁²)` to the given absolute tolerance.
pub fn perimeter_sq_integral(tolerance: f64) -> Result<PerimeterSqResult> {
    if !(tolerance > 0.0 && tolerance.is_finite()) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tolerance}")));
    }
    // the outer value is multiplied by 4π
    let outer_tol = tolerance / (4.0 * PI) / 2.0;
    let inner_tol = outer_tol / (2.0 * PI);
    let mut evaluations = 0usize;
    let mut failure = None;
    let outer = integrate(
        |theta| match inner(theta, inner_tol, &mut evaluations) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        },
        -FRAC_PI_2,
        FRAC_PI_2,
        QuadOptions { abs_tol: outer_tol, max_intervals: 2000 },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer.map_err(|e| match e {
        Error::Convergence(m) => Error::Convergence(format!("E(ℓ²) integral at tolerance {tolerance:e}: {m}")),
        other => other,
    })?;
    // per θ the dropped tail is ≤ 2e^{−C}/(1 − e^{−πU}) with U ≥ C/(π/2)
    let tail = 2.0 * (-U_SCALE).exp() / (-(-2.0 * U_SCALE).exp_m1());
    let truncation_error = 4.0 * PI * PI * tail;
    Ok(PerimeterSqResult {
        value: 4.0 * PI * outer.value,
        abs_error: 4.0 * PI * outer.abs_error + truncation_error,
        truncation_error,
        evaluations: evaluations + outer.evaluations,
    })
}

/// Inner integral at a single `θ`; exposed for checks against known limits.
pub fn perimeter_sq_inner(theta: f64, abs_tol: f64) -> Result<f64> {
    let mut n = 0;
    inner(theta, abs_tol, &mut n)
}
