use std::f64::consts::{LN_2, PI};

use brownian_diameter::analytic::lower::{refine_g_from, NEAR_OPTIMAL_AH};
use brownian_diameter::analytic::{
    self, bounds_report, density_moment, feller_cdf, feller_density, g, g_clamped, lower_bound_chain,
    mean_abs_diff_numeric, optimize_g, perimeter_sq_integral, perimeter_sq_integrand, z_cdf_bounds, SeriesControl,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

fn ctl() -> SeriesControl {
    SeriesControl::default()
}

#[test]
fn density_is_normalized_with_known_moments() {
    let c = ctl();
    assert!((density_moment(0, &c, 1e-12).unwrap().value - 1.0).abs() < 1e-8);
    assert!((density_moment(1, &c, 1e-12).unwrap().value - (8.0 / PI).sqrt()).abs() < 1e-6);
    assert!((density_moment(2, &c, 1e-12).unwrap().value - 4.0 * LN_2).abs() < 1e-6);
}

#[test]
fn density_is_positive_and_vanishes_in_the_tails() {
    let c = ctl();
    for k in 1..120 {
        let r = 0.1 * k as f64;
        assert!(feller_density(r, &c).unwrap() >= 0.0, "r = {r}");
    }
    assert!(feller_density(0.05, &c).unwrap() < 1e-100);
    assert!(feller_density(12.0, &c).unwrap() < 1e-25);
}

#[test]
fn cdf_is_monotone_with_unit_mass() {
    let c = ctl();
    assert_eq!(feller_cdf(0.0, &c).unwrap().value, 0.0);
    let mut prev = 0.0;
    for k in 1..=60 {
        let v = feller_cdf(0.1 * k as f64, &c).unwrap().value;
        assert!(v >= prev && v <= 1.0);
        prev = v;
    }
    assert!((feller_cdf(10.0, &c).unwrap().value - 1.0).abs() < 1e-8);
    assert!(feller_cdf(-1.0, &c).is_err());
}

/// Ranges of a one-dimensional walk on `[0, 1]` at `n` steps and at `4n`
/// steps after two rounds of midpoint refinement.
fn coupled_ranges(n: usize, rng: &mut ChaCha8Rng) -> (f64, f64) {
    let sd = (1.0 / n as f64).sqrt();
    let mut w = Vec::with_capacity(4 * n + 1);
    w.push(0.0);
    for _ in 0..n {
        let z: f64 = rng.sample(StandardNormal);
        w.push(w[w.len() - 1] + sd * z);
    }
    let range = |v: &[f64]| {
        let (lo, hi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        hi - lo
    };
    let coarse = range(&w);
    let mut m = n;
    for _ in 0..2 {
        // bridge midpoint: mean of the neighbours, variance dt/4
        let half_sd = (0.25 / m as f64).sqrt();
        let mut fine = Vec::with_capacity(2 * m + 1);
        for k in 0..m {
            fine.push(w[k]);
            let z: f64 = rng.sample(StandardNormal);
            fine.push(0.5 * (w[k] + w[k + 1]) + half_sd * z);
        }
        fine.push(w[m]);
        w = fine;
        m *= 2;
    }
    (coarse, range(&w))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    0.5 * (v[(n - 1) / 2] + v[n / 2])
}

#[test]
fn cdf_at_simulated_median_is_one_half() {
    const PATHS: u64 = 1_000_000;
    const CHUNK: u64 = 4096;
    let pairs: Vec<(f64, f64)> = (0..PATHS / CHUNK + 1)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(0xFE11E4);
            rng.set_stream(c);
            let len = CHUNK.min(PATHS.saturating_sub(c * CHUNK));
            (0..len).map(move |_| coupled_ranges(1024, &mut rng)).collect::<Vec<_>>()
        })
        .collect();
    assert_eq!(pairs.len() as u64, PATHS);
    let m_coarse = median(pairs.iter().map(|p| p.0).collect());
    let m_fine = median(pairs.iter().map(|p| p.1).collect());
    // median bias shrinks like n^{-1/2}; ratio 2 between 1024 and 4096 steps
    let m = 2.0 * m_fine - m_coarse;
    let p = feller_cdf(m, &ctl()).unwrap().value;
    let se = (0.25 / PATHS as f64).sqrt();
    assert!((p - 0.5).abs() <= 3.0 * se, "median {m}: cdf {p}");
}

#[test]
fn z_bounds_direct_evaluation() {
    let closed = |x: f64| {
        let a = 4.0 / PI * (-PI * PI / (8.0 * x * x)).exp();
        let b = 4.0 / (3.0 * PI) * (-9.0 * PI * PI / (8.0 * x * x)).exp();
        ((a - b).clamp(0.0, 1.0), a.min(1.0))
    };
    for x in [0.3, 0.8, 1.0, 1.5, 2.0, 3.0, 10.0] {
        let (lo, hi) = z_cdf_bounds(x);
        let (elo, ehi) = closed(x);
        assert!((lo - elo).abs() < 1e-15 && (hi - ehi).abs() < 1e-15);
        assert!(lo <= hi);
    }
    let (lo, hi) = z_cdf_bounds(1.0);
    assert!((lo - 0.370777).abs() < 1e-6 && (hi - 0.370784).abs() < 1e-6);
    assert_eq!(z_cdf_bounds(10.0).1, 1.0);
}

#[test]
fn g_near_optimum_and_limits() {
    let (a, h) = NEAR_OPTIMAL_AH;
    assert_eq!(format!("{:.4}", analytic::lower_basic() + g(a, h)), "1.6014");
    assert!(g(a, 1e-9).abs() < 1e-10);
    assert!(g(0.05, h).abs() < 1e-30);
    assert!(g_clamped(a, h) >= 0.0);
}

#[test]
fn optimizer_is_reproducible_from_random_starts() {
    let best = optimize_g();
    assert!(best.g >= g(NEAR_OPTIMAL_AH.0, NEAR_OPTIMAL_AH.1));
    assert!((best.a - 1.492).abs() <= 0.02 && (best.h - 0.337).abs() <= 0.02);
    assert_eq!(optimize_g(), best);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut starts = Vec::new();
    while starts.len() < 10 {
        // starts where the bound is informative; elsewhere g ≤ 0 and the ascent runs to h → 0
        let s = [rng.random_range(0.05..4.0), rng.random_range(0.01..2.0)];
        if g(s[0], s[1]) > 0.0 {
            starts.push(s);
        }
    }
    for start in starts {
        let m = refine_g_from(start);
        assert!((m.value - best.g).abs() <= 1e-8, "start {start:?}: {}", m.value);
    }
}

#[test]
fn lower_bound_chain_is_ordered() {
    let lb = lower_bound_chain();
    assert!((lb - 1.6014).abs() <= 5e-4);
    assert!(lb > analytic::lower_basic());
    let mad = mean_abs_diff_numeric(&ctl()).unwrap();
    assert!(mad.abs_error <= 1e-6);
    assert!(lb <= analytic::lower_basic() + 0.5 * mad.value);
    assert!(mad.value >= 2.0 * optimize_g().g);
}

#[test]
fn mean_abs_diff_dominates_grid() {
    let mad = mean_abs_diff_numeric(&ctl()).unwrap().value;
    for i in 1..=50 {
        for j in 1..=50 {
            let (a, h) = (4.0 * i as f64 / 50.0, 2.0 * j as f64 / 50.0);
            assert!(mad >= 2.0 * g(a, h), "a = {a}, h = {h}");
        }
    }
}

#[test]
fn perimeter_integral() {
    assert!((perimeter_sq_integrand(0.0, 0.0) - 0.5).abs() < 1e-15);
    assert!((perimeter_sq_integrand(0.0, 1e-9) - 0.5).abs() < 1e-8);
    let r = perimeter_sq_integral(1e-8).unwrap();
    // exceeds (E ℓ)² = 8π since the perimeter is not deterministic
    assert!(r.value > 8.0 * PI);
    assert!(r.abs_error + r.truncation_error < 1e-6);
    let loose = perimeter_sq_integral(1e-4).unwrap();
    assert!((loose.value - r.value).abs() < 1e-4);
    assert!(perimeter_sq_integral(0.0).is_err());
    assert!(perimeter_sq_integral(f64::NAN).is_err());
    assert!((r.value / (PI * PI) - 2.651).abs() <= 5e-3);
}

#[test]
fn bounds_report_serializes_every_field() {
    let report = bounds_report(&ctl(), None).unwrap();
    report.check_ordering().unwrap();
    assert_eq!(format!("{:.4}", report.lower_improved), "1.6014");
    assert_eq!(format!("{:.4}", report.upper_improved), "2.3548");
    assert_eq!(format!("{:.4}", report.lower_basic), "1.5958");
    assert_eq!(format!("{:.4}", report.upper_basic), "2.5066");
    assert!(report.d1_sq_lower < report.d1_sq_upper);
    assert!(report.mass_below_r_min < 1e-30);
    let json = serde_json::to_value(&report).unwrap();
    let obj = json.as_object().unwrap();
    assert_eq!(obj.len(), 23);
    let back: analytic::BoundsReport = serde_json::from_value(json).unwrap();
    assert_eq!(back, report);
}
