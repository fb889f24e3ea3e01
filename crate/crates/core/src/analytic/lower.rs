//! The improved lower bound on `E d₁`.
//!
//! With `X₁, X₂` independent copies of the range `r(0)`,
//! `E d₁ ≥ E max{X₁, X₂} = E X + ½ E|X₁ − X₂|`, and
//! `E|X₁ − X₂| ≥ 2h Pr(X ≤ a) Pr(X ≥ a + h)` for all `a, h > 0`. The two
//! probabilities are bounded through `Z = sup |b·e₀|`, using `Z ≤ X ≤ 2Z`
//! and the two-sided estimate of `Pr(Z < x)` in [`z_cdf_bounds`]. The
//! resulting product is [`g`].

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::optimize::{grid_max, nelder_mead_max, GridSpec, Maximum, NelderMeadOptions};

/// Search box for `(a, h)` and the coarse grid spacing.
pub const G_SEARCH: GridSpec = GridSpec { lower: [0.0, 0.0], upper: [4.0, 2.0], step: [0.01, 0.01] };

/// A rounded point near the maximiser of `g`.
pub const NEAR_OPTIMAL_AH: (f64, f64) = (1.492, 0.337);

/// `(4/π) e^{−π²/(8x²)} − (4/(3π)) e^{−9π²/(8x²)}` and `(4/π) e^{−π²/(8x²)}`,
/// bounds on `Pr(Z < x)` clamped to `[0, 1]`. Both vanish as `x → 0⁺`, which
/// is also what is returned for `x ≤ 0`.
pub fn z_cdf_bounds(x: f64) -> (f64, f64) {
    if x.is_nan() || x <= 0.0 {
        return (0.0, 0.0);
    }
    let q = PI * PI / (8.0 * x * x);
    let upper = (4.0 / PI * (-q).exp()).min(1.0);
    let lower = 4.0 / PI * (-q).exp() - 4.0 / (3.0 * PI) * (-9.0 * q).exp();
    (lower.clamp(0.0, upper), upper)
}

/// Lower bound on `Pr(X ≤ a)`, from `Pr(Z ≤ a/2)`, unclamped.
fn range_cdf_lower(a: f64) -> f64 {
    let q = PI * PI / (2.0 * a * a);
    4.0 / PI * (-q).exp() - 4.0 / (3.0 * PI) * (-9.0 * q).exp()
}

/// Lower bound on `Pr(X ≥ a + h)`, from `Pr(Z ≥ a + h)`, unclamped.
fn range_survival_lower(a_plus_h: f64) -> f64 {
    1.0 - 4.0 / PI * (-PI * PI / (8.0 * a_plus_h * a_plus_h)).exp()
}

/// `g(a, h) = h · (lower bound on Pr(X ≤ a)) · (lower bound on Pr(X ≥ a + h))`,
/// evaluated literally. For large `a + h` the second factor is negative.
pub fn g(a: f64, h: f64) -> f64 {
    h * range_cdf_lower(a) * range_survival_lower(a + h)
}

/// [`g`] with both probability factors clamped into `[0, 1]`.
pub fn g_clamped(a: f64, h: f64) -> f64 {
    h * range_cdf_lower(a).clamp(0.0, 1.0) * range_survival_lower(a + h).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GOptimum {
    pub a: f64,
    pub h: f64,
    pub g: f64,
    /// Best point of the coarse grid, before refinement.
    pub grid_a: f64,
    pub grid_h: f64,
    pub grid_g: f64,
    pub evaluations: usize,
}

fn g_of(x: [f64; 2]) -> f64 {
    g(x[0], x[1])
}

/// Nelder–Mead refinement of [`g`] from an arbitrary start inside the box.
pub fn refine_g_from(start: [f64; 2]) -> Maximum {
    let opts = NelderMeadOptions { initial_step: [0.01, 0.01], ..Default::default() };
    nelder_mead_max(&g_of, start, &G_SEARCH, &opts)
}

/// Maximises [`g`] over `(0, 4] × (0, 2]`: a 0.01 grid, then Nelder–Mead
/// from the best grid point. Deterministic.
pub fn optimize_g() -> GOptimum {
    let coarse = grid_max(&g_of, &G_SEARCH);
    let fine = refine_g_from(coarse.x);
    let best = if fine.value >= coarse.value { fine } else { coarse };
    GOptimum {
        a: best.x[0],
        h: best.x[1],
        g: best.value,
        grid_a: coarse.x[0],
        grid_h: coarse.x[1],
        grid_g: coarse.value,
        evaluations: coarse.evaluations + fine.evaluations,
    }
}

/// `√(8/π) + g*`, with the probability factors clamped at the optimiser.
pub fn lower_bound_chain() -> f64 {
    let opt = optimize_g();
    super::lower_basic() + g_clamped(opt.a, opt.h).max(0.0)
}
