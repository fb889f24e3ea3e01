use std::f64::consts::{LN_2, PI};

use brownian_diameter::analytic::{self, mean_abs_diff_numeric, perimeter_sq_integral, SeriesControl};
use brownian_diameter::mc::{
    estimate_max_two_ranges, estimate_range_pair, sandwich_audit, simulate, sup_abs_cdf, RangePair, Z95,
};
use brownian_diameter::path::{sample_path, PathConfig};
use brownian_diameter::{EstimatorConfig, Functional};

const SEED: u64 = 20_240_611;

/// Two-sided 10⁻³ normal quantile.
const Z_1E3: f64 = 3.2905;

struct Sums {
    n: f64,
    sx: f64,
    sy: f64,
    sxx: f64,
    syy: f64,
    sxy: f64,
}

impl Sums {
    fn new() -> Self {
        Sums { n: 0.0, sx: 0.0, sy: 0.0, sxx: 0.0, syy: 0.0, sxy: 0.0 }
    }

    fn push(&mut self, x: f64, y: f64) {
        self.n += 1.0;
        self.sx += x;
        self.sy += y;
        self.sxx += x * x;
        self.syy += y * y;
        self.sxy += x * y;
    }

    /// z-scores of mean 0, variance 1 and zero covariance for standard
    /// normal pairs.
    fn z_scores(&self) -> [f64; 5] {
        let n = self.n;
        [
            self.sx / n.sqrt(),
            self.sy / n.sqrt(),
            // var(X²) = 2
            (self.sxx / n - 1.0) / (2.0 / n).sqrt(),
            (self.syy / n - 1.0) / (2.0 / n).sqrt(),
            (self.sxy / n) * n.sqrt(),
        ]
    }
}

#[test]
fn single_step_increments_are_standard_normal() {
    let mut s = Sums::new();
    for r in 0..1_000_000 {
        let p = sample_path(&PathConfig::new(1, SEED, r)).unwrap();
        let q = p.points()[1];
        s.push(q.x, q.y);
    }
    for z in s.z_scores() {
        assert!(z.abs() < Z_1E3, "{:?}", s.z_scores());
    }
}

#[test]
fn fine_increments_scale_and_decorrelate() {
    let n = 1024usize;
    let mut s = Sums::new();
    let mut lag = 0.0;
    let mut count = 0.0;
    for r in 0..1000 {
        let p = sample_path(&PathConfig::new(n, SEED, r)).unwrap();
        let pts = p.points();
        let scale = (n as f64).sqrt();
        let inc: Vec<(f64, f64)> =
            pts.windows(2).map(|w| ((w[1].x - w[0].x) * scale, (w[1].y - w[0].y) * scale)).collect();
        for (k, &(x, y)) in inc.iter().enumerate() {
            s.push(x, y);
            if k > 0 {
                lag += inc[k - 1].0 * x;
                count += 1.0;
            }
        }
    }
    for z in s.z_scores() {
        assert!(z.abs() < Z_1E3, "{:?}", s.z_scores());
    }
    assert!((lag / count * count.sqrt()).abs() < Z_1E3);
}

#[test]
fn bias_is_downward_and_shrinks_with_level() {
    let cfg = EstimatorConfig::new(
        100_000,
        vec![1024, 2048, 4096],
        SEED,
        vec![Functional::Range, Functional::Area, Functional::DiameterSq, Functional::Perimeter],
    );
    let run = simulate(&cfg).unwrap();
    assert_eq!(run.audit.total_violations(), 0);
    for (f, exact) in [
        (Functional::Range, analytic::lower_basic()),
        (Functional::Area, PI / 2.0),
        (Functional::Perimeter, (8.0 * PI).sqrt()),
    ] {
        let levels = run.levels(f);
        for w in levels.windows(2) {
            assert!(w[0].mean < w[1].mean, "{f}");
        }
        let fine = levels.last().unwrap();
        assert!(fine.mean <= exact + 3.0 * fine.stderr, "{f}: {} vs {exact}", fine.mean);
        // gap to the exact value shrinks as the level doubles
        let gaps: Vec<f64> = levels.iter().map(|e| exact - e.mean).collect();
        assert!(gaps.windows(2).all(|g| g[1] < g[0]), "{f}: {gaps:?}");
    }
    for e in &run.estimates {
        assert!(e.stderr >= 0.0);
        assert_eq!(e.ci95, [e.mean - Z95 * e.stderr, e.mean + Z95 * e.stderr]);
    }
    // second moment of the diameter between its two analytic bounds
    let d2 = run.finest(Functional::DiameterSq).unwrap();
    let (x, se) = (d2.extrapolated.unwrap(), d2.extrapolated_stderr.unwrap());
    let lower = perimeter_sq_integral(1e-8).unwrap().value / (PI * PI);
    assert!(lower - 3.0 * se - 1e-6 <= x && x <= 8.0 * LN_2 + 3.0 * se, "E d² = {x} ± {se}");
    assert!((2.651 - 3.0 * d2.stderr..=8.0 * LN_2 + 3.0 * d2.stderr).contains(&d2.mean));
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let cfg = EstimatorConfig::new(3000, vec![64, 256], SEED, Functional::ALL.to_vec());
    let runs: Vec<_> = [1, 2, 5]
        .iter()
        .map(|&t| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(t).build().unwrap();
            pool.install(|| simulate(&cfg).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[0], runs[2]);
    assert_eq!(simulate(&cfg).unwrap(), runs[0]);
    assert_eq!(sandwich_audit(&cfg).unwrap(), runs[0].audit);
}

#[test]
fn max_of_two_ranges_matches_quadrature() {
    let cfg = EstimatorConfig::new(20_000, vec![1024, 4096], SEED, vec![Functional::Range]);
    let target = analytic::lower_basic() + 0.5 * mean_abs_diff_numeric(&SeriesControl::default()).unwrap().value;
    let orthogonal = estimate_max_two_ranges(&cfg, false).unwrap();
    let two_paths = estimate_max_two_ranges(&cfg, true).unwrap();
    for e in [&orthogonal, &two_paths] {
        let (x, se) = (e.extrapolated.unwrap(), e.extrapolated_stderr.unwrap());
        assert!((x - target).abs() <= 3.0 * se, "{x} ± {se} vs {target}");
    }
    let joint = orthogonal.best_stderr().hypot(two_paths.best_stderr());
    assert!((orthogonal.best_value() - two_paths.best_value()).abs() <= 3.0 * joint);

    // the maximum dominates r(0) replicate by replicate
    let range = simulate(&cfg).unwrap();
    let r = range.finest(Functional::Range).unwrap();
    assert!(orthogonal.mean >= r.mean && two_paths.mean >= r.mean);
    // and through the simulate path the same functional agrees exactly
    let cfg_m = EstimatorConfig { functionals: vec![Functional::MaxTwoRanges], ..cfg };
    assert_eq!(simulate(&cfg_m).unwrap().finest(Functional::MaxTwoRanges).unwrap().mean, orthogonal.mean);
}

#[test]
fn mean_abs_difference_of_independent_ranges() {
    let cfg = EstimatorConfig::new(200_000, vec![256, 1024], SEED, vec![Functional::Range]);
    let e = estimate_range_pair(&cfg, RangePair::AbsDifferenceTwoPaths).unwrap();
    let mad = mean_abs_diff_numeric(&SeriesControl::default()).unwrap().value;
    let (x, se) = (e.extrapolated.unwrap(), e.extrapolated_stderr.unwrap());
    assert!((x - mad).abs() <= 3.0 * se, "{x} ± {se} vs {mad}");
}

#[test]
fn max_modulus_probabilities() {
    let est = sup_abs_cdf(20_000, 1024, SEED, &[0.5, 1.0, 1.5, 2.0, 3.0]).unwrap();
    assert!(est.windows(2).all(|w| w[0].probability <= w[1].probability));
    for e in &est {
        let (lo, hi) = analytic::z_cdf_bounds(e.x);
        assert!(e.probability >= lo - 3.0 * e.stderr && e.probability <= hi + 3.0 * e.stderr + 0.02);
    }
    assert!(sup_abs_cdf(0, 16, SEED, &[1.0]).is_err());
    assert_eq!(sup_abs_cdf(300, 16, SEED, &[1.0]).unwrap(), sup_abs_cdf(300, 16, SEED, &[1.0]).unwrap());
}

#[test]
fn invalid_configurations_rejected() {
    let ok = EstimatorConfig::new(100, vec![16, 64], SEED, vec![Functional::Diameter]);
    assert!(ok.validate().is_ok());
    for bad in [
        EstimatorConfig { n_paths: 99, ..ok.clone() },
        EstimatorConfig { step_levels: vec![], ..ok.clone() },
        EstimatorConfig { step_levels: vec![64, 16], ..ok.clone() },
        EstimatorConfig { step_levels: vec![24, 48], ..ok.clone() },
        EstimatorConfig { functionals: vec![], ..ok.clone() },
    ] {
        assert!(simulate(&bad).is_err());
    }
}
