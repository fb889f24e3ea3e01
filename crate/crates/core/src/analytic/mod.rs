//! Closed-form constants and numerically evaluated bounds on `E d₁`.

pub mod density;
pub mod lower;
pub mod perimeter;

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::MonteCarloEstimate;

pub use density::{
    density_moment, feller_cdf, feller_density, feller_density_series, mean_abs_diff_numeric, SeriesControl,
    SeriesValue, R_MAX, R_MIN,
};
pub use lower::{g, g_clamped, lower_bound_chain, optimize_g, z_cdf_bounds, GOptimum};
pub use perimeter::{perimeter_sq_integral, perimeter_sq_integrand, PerimeterSqResult};

/// `E r(θ) = √(8/π)`, the basic lower bound on `E d₁`.
pub fn lower_basic() -> f64 {
    (8.0 / PI).sqrt()
}

/// `√(2π) = E ℓ₁ / 2`, the basic upper bound on `E d₁`.
pub fn upper_basic() -> f64 {
    (2.0 * PI).sqrt()
}

/// `E r(θ)² = 4 log 2`.
pub fn range_second_moment() -> f64 {
    4.0 * LN_2
}

/// `E d₁² ≤ E(r(0)² + r(π/2)²) = 8 log 2`.
pub fn d1_sq_upper() -> f64 {
    8.0 * LN_2
}

/// `√(8 log 2)`, the upper bound on `E d₁` from Jensen's inequality.
pub fn upper_bound_d1() -> f64 {
    d1_sq_upper().sqrt()
}

/// `E ℓ₁ = √(8π)`.
pub fn expected_perimeter() -> f64 {
    (8.0 * PI).sqrt()
}

/// `E a₁ = π/2`.
pub fn expected_area() -> f64 {
    PI / 2.0
}

/// Tolerance used for the `E(ℓ₁²)` integral in [`bounds_report`].
pub const PERIMETER_SQ_TOLERANCE: f64 = 1e-8;

/// Every analytic quantity, with the error estimates that go with them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub lower_basic: f64,
    pub upper_basic: f64,
    pub lower_improved: f64,
    /// `√(8/π) + ½ E|X₁ − X₂|` with the expectation computed numerically.
    pub lower_sharper: f64,
    pub upper_improved: f64,
    pub g_star: f64,
    pub a_star: f64,
    pub h_star: f64,
    pub mean_abs_diff: f64,
    pub mean_abs_diff_error: f64,
    pub d1_sq_upper: f64,
    pub d1_sq_lower: f64,
    pub perimeter_sq: f64,
    pub perimeter_sq_error: f64,
    pub perimeter_sq_truncation_error: f64,
    pub perimeter_sq_tolerance: f64,
    pub series_tail_tolerance: f64,
    pub series_k_max: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub mass_below_r_min: f64,
    pub mass_above_r_max: f64,
    pub mc_estimate: Option<MonteCarloEstimate>,
}

impl BoundsReport {
    /// Checks `lower_basic ≤ lower_improved ≤ lower_sharper < upper_improved ≤ upper_basic`,
    /// the Monte Carlo value (if present) strictly inside the improved bounds, and
    /// `d1_sq_lower < d1_sq_upper`.
    pub fn check_ordering(&self) -> Result<()> {
        let chain = [
            ("lower_basic", self.lower_basic),
            ("lower_improved", self.lower_improved),
            ("lower_sharper", self.lower_sharper),
            ("upper_improved", self.upper_improved),
            ("upper_basic", self.upper_basic),
        ];
        for w in chain.windows(2) {
            if w[0].1 > w[1].1 {
                return Err(Error::Ordering(format!("{} = {} exceeds {} = {}", w[0].0, w[0].1, w[1].0, w[1].1)));
            }
        }
        if let Some(mc) = &self.mc_estimate {
            let v = mc.best_value();
            if !(self.lower_sharper < v && v < self.upper_improved) {
                return Err(Error::Ordering(format!(
                    "Monte Carlo value {v} outside ({}, {})",
                    self.lower_sharper, self.upper_improved
                )));
            }
        }
        if self.d1_sq_lower >= self.d1_sq_upper {
            return Err(Error::Ordering(format!(
                "E d² lower bound {} not below upper bound {}",
                self.d1_sq_lower, self.d1_sq_upper
            )));
        }
        Ok(())
    }
}

/// Computes every analytic bound and checks their ordering.
pub fn bounds_report(ctl: &SeriesControl, mc_estimate: Option<MonteCarloEstimate>) -> Result<BoundsReport> {
    ctl.validate()?;
    let opt = optimize_g();
    let lower_improved = lower_basic() + g_clamped(opt.a, opt.h).max(0.0);
    let mad = mean_abs_diff_numeric(ctl)?;
    let perim = perimeter_sq_integral(PERIMETER_SQ_TOLERANCE)?;
    let report = BoundsReport {
        lower_basic: lower_basic(),
        upper_basic: upper_basic(),
        lower_improved,
        lower_sharper: lower_basic() + 0.5 * mad.value,
        upper_improved: upper_bound_d1(),
        g_star: opt.g,
        a_star: opt.a,
        h_star: opt.h,
        mean_abs_diff: mad.value,
        mean_abs_diff_error: mad.abs_error,
        d1_sq_upper: d1_sq_upper(),
        d1_sq_lower: perim.value / (PI * PI),
        perimeter_sq: perim.value,
        perimeter_sq_error: perim.abs_error,
        perimeter_sq_truncation_error: perim.truncation_error,
        perimeter_sq_tolerance: PERIMETER_SQ_TOLERANCE,
        series_tail_tolerance: ctl.tail_tolerance,
        series_k_max: ctl.k_max,
        r_min: R_MIN,
        r_max: R_MAX,
        mass_below_r_min: density::mass_below_r_min(),
        mass_above_r_max: density::tail_moment_bound(0),
        mc_estimate,
    };
    report.check_ordering()?;
    Ok(report)
}
