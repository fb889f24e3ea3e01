//! Density of the range `X = sup b − inf b` of one-dimensional standard
//! Brownian motion on `[0, 1]`:
//!
//! ```text
//! f(r) = 8/√(2π) · Σ_{k≥1} (−1)^{k−1} k² exp(−k² r² / 2),   r > 0.
//! ```
//!
//! The series is evaluated as a truncated alternating sum. Below
//! [`R_MIN`] it needs on the order of `1/r` terms and cancels badly, so
//! evaluation there is refused; the probability mass below `R_MIN` is
//! bounded through `X ≥ Z = sup |b|` and the upper tail estimate of
//! `Pr(Z < x)`, and is carried in the error fields. Integrals are truncated
//! at [`R_MAX`], where the density is below its first term and the omitted
//! mass is bounded by a Gaussian tail.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate, integrate_pieces, QuadOptions, QuadResult};

pub const R_MIN: f64 = 0.05;
pub const R_MAX: f64 = 12.0;

/// `8 / √(2π)`.
const PREFACTOR: f64 = 3.191_538_243_211_461_6;

/// Break points used for integrals over `[R_MIN, R_MAX]`.
const BREAKS: [f64; 9] = [R_MIN, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, R_MAX];

/// Truncation control for the alternating series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    /// Summation stops once the magnitude of the next term falls below this.
    pub tail_tolerance: f64,
    /// Maximum number of terms before giving up.
    pub k_max: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl { tail_tolerance: 1e-15, k_max: 10_000 }
    }
}

impl SeriesControl {
    pub fn validate(&self) -> Result<()> {
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance.is_finite()) {
            return Err(Error::Config(format!("tail_tolerance must be positive, got {}", self.tail_tolerance)));
        }
        if self.k_max < 100 {
            return Err(Error::Config(format!("k_max must be at least 100, got {}", self.k_max)));
        }
        Ok(())
    }
}

/// A truncated evaluation of the series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesValue {
    pub value: f64,
    /// Number of terms summed.
    pub terms: usize,
    /// Magnitude of the last term included.
    pub last_term: f64,
    /// Magnitude of the first omitted term, which bounds the truncation error.
    pub next_term: f64,
}

#[inline]
fn term(k: usize, r: f64) -> f64 {
    let k = k as f64;
    PREFACTOR * k * k * (-0.5 * k * k * r * r).exp()
}

/// Evaluates the density series with full bookkeeping.
pub fn feller_density_series(r: f64, ctl: &SeriesControl) -> Result<SeriesValue> {
    ctl.validate()?;
    if !r.is_finite() || r < R_MIN {
        return Err(Error::Domain(format!("density is evaluated only for r >= {R_MIN}, got {r}")));
    }
    // terms k² e^{-k²r²/2} decrease once k² r² > 2
    let peak = (2.0_f64.sqrt() / r).ceil() as usize;
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut k = 1;
    loop {
        let t = term(k, r);
        sum += if k % 2 == 1 { t } else { -t };
        abs_sum += t;
        let next = term(k + 1, r);
        if k >= peak && next < ctl.tail_tolerance {
            // below the rounding floor of the partial sum the value is zero
            let floor = 4.0 * f64::EPSILON * abs_sum;
            let value = if sum <= floor { 0.0 } else { sum };
            return Ok(SeriesValue { value, terms: k, last_term: t, next_term: next });
        }
        k += 1;
        if k > ctl.k_max {
            return Err(Error::Convergence(format!(
                "density series at r = {r} did not reach {:e} within {} terms",
                ctl.tail_tolerance, ctl.k_max
            )));
        }
    }
}

/// Density of the unit-time range of 1-D Brownian motion.
pub fn feller_density(r: f64, ctl: &SeriesControl) -> Result<f64> {
    feller_density_series(r, ctl).map(|s| s.value)
}

/// Upper bound on `Pr(X < R_MIN)`: `X ≥ Z` and `Pr(Z < x) ≤ (4/π) e^{−π²/(8x²)}`.
pub fn mass_below_r_min() -> f64 {
    super::lower::z_cdf_bounds(R_MIN).1
}

fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Upper bound on `∫_{R_MAX}^∞ r^p f(r) dr` for `p ∈ {0, 1, 2}`.
///
/// Beyond `R_MAX` the series terms are decreasing, so `f(r) ≤ 8 φ(r)`; the
/// Gaussian moments then follow from Mills' ratio.
pub fn tail_moment_bound(p: u32) -> f64 {
    let phi = std_normal_pdf(R_MAX);
    8.0 * match p {
        0 => phi / R_MAX,
        1 => phi,
        2 => phi * (R_MAX + 1.0 / R_MAX),
        _ => phi * R_MAX.powi(p as i32) * 2.0,
    }
}

fn density_or_nan(r: f64, ctl: &SeriesControl) -> f64 {
    feller_density(r, ctl).unwrap_or(f64::NAN)
}

/// `∫ r^p f(r) dr` over `[R_MIN, R_MAX]`; truncation bounds are added to
/// the error estimate.
pub fn density_moment(p: u32, ctl: &SeriesControl, abs_tol: f64) -> Result<QuadResult> {
    ctl.validate()?;
    let r = integrate_pieces(|x| x.powi(p as i32) * density_or_nan(x, ctl), &BREAKS, QuadOptions::new(abs_tol))?;
    let below = mass_below_r_min() * R_MIN.powi(p as i32);
    Ok(QuadResult { abs_error: r.abs_error + below + tail_moment_bound(p), ..r })
}

/// Distribution function of the range, `Pr(X ≤ x)`, clamped to `[0, 1]`.
pub fn feller_cdf(x: f64, ctl: &SeriesControl) -> Result<QuadResult> {
    ctl.validate()?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::Domain(format!("cdf argument must be >= 0, got {x}")));
    }
    if x <= R_MIN {
        return Ok(QuadResult { value: 0.0, abs_error: mass_below_r_min(), evaluations: 0 });
    }
    let upper = x.min(R_MAX);
    let mut breaks: Vec<f64> = BREAKS.iter().copied().filter(|&b| b < upper).collect();
    breaks.push(upper);
    let r = integrate_pieces(|y| density_or_nan(y, ctl), &breaks, QuadOptions::new(1e-13))?;
    let tail = if x < R_MAX { 0.0 } else { tail_moment_bound(0) };
    Ok(QuadResult {
        value: r.value.clamp(0.0, 1.0),
        abs_error: r.abs_error + mass_below_r_min() + tail,
        evaluations: r.evaluations,
    })
}

/// `E|X₁ − X₂|` for independent copies of the range, by nested quadrature
/// of `∫∫ |x − y| f(x) f(y) dx dy` over `[R_MIN, R_MAX]²`.
///
/// The inner integral is split at `y = x`, where `|x − y|` has its kink.
pub fn mean_abs_diff_numeric(ctl: &SeriesControl) -> Result<QuadResult> {
    ctl.validate()?;
    let inner_opts = QuadOptions::new(1e-12);
    let mut failure: Option<Error> = None;
    let outer = integrate_pieces(
        |x| {
            let fx = density_or_nan(x, ctl);
            if fx == 0.0 || failure.is_some() {
                return 0.0;
            }
            let below = integrate(|y| (x - y) * density_or_nan(y, ctl), R_MIN, x, inner_opts);
            let above = integrate(|y| (y - x) * density_or_nan(y, ctl), x, R_MAX, inner_opts);
            match (below, above) {
                (Ok(b), Ok(a)) => fx * (b.value + a.value),
                (Err(e), _) | (_, Err(e)) => {
                    failure = Some(e);
                    0.0
                }
            }
        },
        &BREAKS,
        QuadOptions::new(1e-10),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let outer = outer?;
    // any pair with a coordinate outside the box contributes at most
    // 2·(E X·tail mass + tail first moment) plus the mass below R_MIN
    let truncation = 2.0 * (1.6 * tail_moment_bound(0) + tail_moment_bound(1)) + 2.0 * R_MAX * mass_below_r_min();
    Ok(QuadResult {
        value: outer.value,
        abs_error: outer.abs_error + 2e-12 * R_MAX + truncation,
        evaluations: outer.evaluations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn domain_floor() {
        let ctl = SeriesControl::default();
        assert!(matches!(feller_density(0.04, &ctl), Err(Error::Domain(_))));
        assert!(matches!(feller_density(f64::NAN, &ctl), Err(Error::Domain(_))));
        assert!(feller_density(R_MIN, &ctl).is_ok());
    }

    #[test]
    fn k_max_exhaustion() {
        let ctl = SeriesControl { tail_tolerance: 1e-15, k_max: 100 };
        assert!(matches!(feller_density(0.05, &ctl), Err(Error::Convergence(_))));
        assert!(feller_density(1.0, &ctl).is_ok());
    }

    #[test]
    fn control_validation() {
        assert!(SeriesControl { tail_tolerance: 0.0, k_max: 100 }.validate().is_err());
        assert!(SeriesControl { tail_tolerance: 1e-12, k_max: 99 }.validate().is_err());
        assert!(SeriesControl::default().tail_tolerance <= 1e-10);
    }

    #[test]
    fn stopping_index_has_decreasing_terms() {
        let ctl = SeriesControl::default();
        for r in [0.05, 0.1, 0.3, 0.7, 1.0, 1.6, 3.0, 8.0] {
            let s = feller_density_series(r, &ctl).unwrap();
            assert!(s.next_term < s.last_term, "r = {r}");
            assert!(s.next_term < ctl.tail_tolerance);
            assert!(s.value >= 0.0);
        }
    }

    #[test]
    fn large_r_is_first_term() {
        // the second term is e^{-3r²/2}·4 relative smaller; negligible at r = 6
        let ctl = SeriesControl::default();
        let r = 6.0;
        let f = feller_density(r, &ctl).unwrap();
        let first = PREFACTOR * (-0.5 * r * r).exp();
        assert!((f - first).abs() <= 1e-12 * first);
    }

    #[test]
    fn cdf_edges() {
        let ctl = SeriesControl::default();
        assert_eq!(feller_cdf(0.0, &ctl).unwrap().value, 0.0);
        assert!(feller_cdf(-1.0, &ctl).is_err());
        let hi = feller_cdf(10.0, &ctl).unwrap();
        assert!((hi.value - 1.0).abs() < 1e-8, "{}", hi.value);
        assert!(mass_below_r_min() < 1e-30);
        assert!(tail_moment_bound(2) < 1e-28);
    }
}
