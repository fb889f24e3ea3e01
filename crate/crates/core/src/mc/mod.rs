//! Monte Carlo estimation of hull functionals of planar Brownian motion.
//!
//! Replicates are processed in fixed blocks of [`BLOCK_SIZE`] consecutive
//! replicate indices. Each block is summarised sequentially; block summaries
//! are then merged by [`stats::tree_reduce`]. Neither step depends on how
//! rayon schedules the blocks, so results are bit-identical for any thread
//! count.
//!
//! Every replicate is one Brownian path observed at all requested step
//! levels (coarsest drawn directly, finer ones by midpoint refinement), so
//! differences between levels are low-variance estimates of the
//! discretisation bias. The extrapolated value assumes a bias of order
//! `n^{-1/2}`: with `ρ = √(n₂/n₁)` for the two finest levels it is
//! `(ρ·X₂ − X₁)/(ρ − 1)`, computed per replicate. It is a model-based
//! correction, not a rigorous one.

pub mod stats;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::HullStats;
use crate::path::{
    path_hull_stats, refinement_schedule, sample_ladder, sample_path, PathConfig, DOMAIN_BASE, DOMAIN_COMPANION,
};
use stats::{tree_reduce, Moments};

/// Replicates per reduction block.
pub const BLOCK_SIZE: u64 = 256;

/// Normal quantile used for the 95% interval.
pub const Z95: f64 = 1.96;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Diameter,
    Perimeter,
    Area,
    /// `r(0)`, the extent of the x-coordinate.
    Range,
    /// `max{r(0), r(π/2)}`.
    MaxTwoRanges,
    DiameterSq,
    PerimeterSq,
}

impl Functional {
    pub const ALL: [Functional; 7] = [
        Functional::Diameter,
        Functional::Perimeter,
        Functional::Area,
        Functional::Range,
        Functional::MaxTwoRanges,
        Functional::DiameterSq,
        Functional::PerimeterSq,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Functional::Diameter => "diameter",
            Functional::Perimeter => "perimeter",
            Functional::Area => "area",
            Functional::Range => "range",
            Functional::MaxTwoRanges => "max_two_ranges",
            Functional::DiameterSq => "diameter_sq",
            Functional::PerimeterSq => "perimeter_sq",
        }
    }

    pub fn value(self, s: &HullStats) -> f64 {
        match self {
            Functional::Diameter => s.diameter,
            Functional::Perimeter => s.perimeter,
            Functional::Area => s.area,
            Functional::Range => s.range_x,
            Functional::MaxTwoRanges => s.range_x.max(s.range_y),
            Functional::DiameterSq => s.diameter_sq,
            Functional::PerimeterSq => s.perimeter * s.perimeter,
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "d" | "diameter" => Functional::Diameter,
            "l" | "perimeter" => Functional::Perimeter,
            "a" | "area" => Functional::Area,
            "r" | "range" => Functional::Range,
            "m" | "max" | "max_two_ranges" => Functional::MaxTwoRanges,
            "d2" | "diameter_sq" => Functional::DiameterSq,
            "l2" | "perimeter_sq" => Functional::PerimeterSq,
            other => return Err(Error::Config(format!("unknown functional '{other}'"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub n_paths: u64,
    /// Strictly increasing powers of two.
    pub step_levels: Vec<usize>,
    pub seed: u64,
    pub functionals: Vec<Functional>,
}

impl EstimatorConfig {
    pub fn new(n_paths: u64, step_levels: Vec<usize>, seed: u64, functionals: Vec<Functional>) -> Self {
        EstimatorConfig { n_paths, step_levels, seed, functionals }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 100 {
            return Err(Error::Config(format!("n_paths must be at least 100, got {}", self.n_paths)));
        }
        refinement_schedule(&self.step_levels)?;
        if self.functionals.is_empty() {
            return Err(Error::Config("no functionals requested".into()));
        }
        Ok(())
    }

    fn canonical_functionals(&self) -> Vec<Functional> {
        let mut f = self.functionals.clone();
        f.sort();
        f.dedup();
        f
    }

    fn blocks(&self) -> Vec<(u64, u64)> {
        (0..self.n_paths.div_ceil(BLOCK_SIZE))
            .map(|b| (b * BLOCK_SIZE, ((b + 1) * BLOCK_SIZE).min(self.n_paths)))
            .collect()
    }
}

/// Richardson factor `ρ = √(fine/coarse)` for an `n^{-1/2}` bias.
pub fn extrapolation_ratio(coarse: usize, fine: usize) -> f64 {
    (fine as f64 / coarse as f64).sqrt()
}

/// `(ρ·fine − coarse)/(ρ − 1)`.
pub fn extrapolate(coarse_value: f64, fine_value: f64, ratio: f64) -> f64 {
    (ratio * fine_value - coarse_value) / (ratio - 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub functional: Functional,
    pub n_steps: usize,
    pub mean: f64,
    pub stderr: f64,
    pub ci95: [f64; 2],
    pub n_paths: u64,
    /// Extrapolation to the continuum from the two finest levels; only on
    /// the finest-level row.
    pub extrapolated: Option<f64>,
    pub extrapolated_stderr: Option<f64>,
}

impl MonteCarloEstimate {
    fn from_moments(functional: Functional, n_steps: usize, m: &Moments, extrap: Option<&Moments>) -> Self {
        let se = m.stderr();
        MonteCarloEstimate {
            functional,
            n_steps,
            mean: m.mean,
            stderr: se,
            ci95: [m.mean - Z95 * se, m.mean + Z95 * se],
            n_paths: m.n,
            extrapolated: extrap.map(|e| e.mean),
            extrapolated_stderr: extrap.map(|e| e.stderr()),
        }
    }

    /// The extrapolated value when there is one, the mean otherwise.
    pub fn best_value(&self) -> f64 {
        self.extrapolated.unwrap_or(self.mean)
    }

    pub fn best_stderr(&self) -> f64 {
        self.extrapolated_stderr.unwrap_or(self.stderr)
    }
}

/// Kinds of per-sample inequality checked by the audit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// `ℓ/π ≤ d ≤ ℓ/2`.
    Perimeter,
    /// `max(r(0), r(π/2)) ≤ d ≤ √(r(0)² + r(π/2)²)`.
    Range,
    /// Diameter, perimeter or area decreased under refinement.
    Refinement,
}

impl fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ViolationKind::Perimeter => "perimeter/diameter sandwich",
            ViolationKind::Range => "range/diameter sandwich",
            ViolationKind::Refinement => "monotonicity under refinement",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub replicate: u64,
    pub n_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AuditReport {
    pub seed: u64,
    pub paths_checked: u64,
    pub perimeter_violations: u64,
    pub range_violations: u64,
    pub refinement_violations: u64,
    /// Lowest-indexed offending replicate, for reproduction.
    pub first_violation: Option<Violation>,
}

impl AuditReport {
    pub fn total_violations(&self) -> u64 {
        self.perimeter_violations + self.range_violations + self.refinement_violations
    }

    fn record(&mut self, v: Violation) {
        match v.kind {
            ViolationKind::Perimeter => self.perimeter_violations += 1,
            ViolationKind::Range => self.range_violations += 1,
            ViolationKind::Refinement => self.refinement_violations += 1,
        }
        if self.first_violation.is_none() {
            self.first_violation = Some(v);
        }
    }

    fn merge(&self, other: &AuditReport) -> AuditReport {
        AuditReport {
            seed: self.seed,
            paths_checked: self.paths_checked + other.paths_checked,
            perimeter_violations: self.perimeter_violations + other.perimeter_violations,
            range_violations: self.range_violations + other.range_violations,
            refinement_violations: self.refinement_violations + other.refinement_violations,
            first_violation: self.first_violation.or(other.first_violation),
        }
    }

    /// Turns any recorded violation into an error naming the replicate.
    pub fn into_result(self) -> Result<AuditReport> {
        match self.first_violation {
            None => Ok(self),
            Some(v) => Err(Error::SandwichViolation {
                kind: v.kind.to_string(),
                seed: self.seed,
                replicate: v.replicate,
                n_steps: v.n_steps,
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub config: EstimatorConfig,
    pub estimates: Vec<MonteCarloEstimate>,
    pub audit: AuditReport,
}

impl SimulationReport {
    pub fn get(&self, functional: Functional, n_steps: usize) -> Option<&MonteCarloEstimate> {
        self.estimates.iter().find(|e| e.functional == functional && e.n_steps == n_steps)
    }

    /// Finest-level row of a functional.
    pub fn finest(&self, functional: Functional) -> Option<&MonteCarloEstimate> {
        self.estimates.iter().filter(|e| e.functional == functional).max_by_key(|e| e.n_steps)
    }

    pub fn levels(&self, functional: Functional) -> Vec<&MonteCarloEstimate> {
        self.estimates.iter().filter(|e| e.functional == functional).collect()
    }
}

#[derive(Clone)]
struct BlockSummary {
    /// Indexed `[functional][level]`.
    moments: Vec<Vec<Moments>>,
    extrapolated: Vec<Moments>,
    audit: AuditReport,
}

impl BlockSummary {
    fn merge(&self, other: &BlockSummary) -> BlockSummary {
        BlockSummary {
            moments: self
                .moments
                .iter()
                .zip(&other.moments)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x.merge(y)).collect())
                .collect(),
            extrapolated: self.extrapolated.iter().zip(&other.extrapolated).map(|(x, y)| x.merge(y)).collect(),
            audit: self.audit.merge(&other.audit),
        }
    }
}

fn audit_replicate(audit: &mut AuditReport, replicate: u64, levels: &[usize], stats: &[HullStats]) {
    for (s, &n) in stats.iter().zip(levels) {
        audit.paths_checked += 1;
        if !s.perimeter_sandwich_holds() {
            audit.record(Violation { kind: ViolationKind::Perimeter, replicate, n_steps: n });
        }
        if !s.range_sandwich_holds() {
            audit.record(Violation { kind: ViolationKind::Range, replicate, n_steps: n });
        }
    }
    for (w, &n) in stats.windows(2).zip(&levels[1..]) {
        let (c, f) = (&w[0], &w[1]);
        if f.diameter_sq < c.diameter_sq || f.perimeter < c.perimeter || f.area < c.area {
            audit.record(Violation { kind: ViolationKind::Refinement, replicate, n_steps: n });
        }
    }
}

/// Runs the simulation once: per-level estimates for every requested
/// functional plus the per-sample audit of every generated path.
pub fn simulate(config: &EstimatorConfig) -> Result<SimulationReport> {
    config.validate()?;
    let functionals = config.canonical_functionals();
    let levels = &config.step_levels;
    let ratio = (levels.len() >= 2).then(|| extrapolation_ratio(levels[levels.len() - 2], levels[levels.len() - 1]));

    let blocks: Vec<BlockSummary> = config
        .blocks()
        .into_par_iter()
        .map(|(start, end)| -> Result<BlockSummary> {
            let mut block = BlockSummary {
                moments: vec![vec![Moments::default(); levels.len()]; functionals.len()],
                extrapolated: vec![Moments::default(); functionals.len()],
                audit: AuditReport { seed: config.seed, ..Default::default() },
            };
            for replicate in start..end {
                let ladder = sample_ladder(config.seed, DOMAIN_BASE, replicate, levels)?;
                let stats: Vec<HullStats> = ladder.iter().map(path_hull_stats).collect();
                audit_replicate(&mut block.audit, replicate, levels, &stats);
                for (fi, f) in functionals.iter().enumerate() {
                    for (li, s) in stats.iter().enumerate() {
                        block.moments[fi][li].push(f.value(s));
                    }
                    if let Some(rho) = ratio {
                        let k = stats.len();
                        block.extrapolated[fi].push(extrapolate(f.value(&stats[k - 2]), f.value(&stats[k - 1]), rho));
                    }
                }
            }
            Ok(block)
        })
        .collect::<Result<_>>()?;

    let total = tree_reduce(&blocks, &|a: &BlockSummary, b: &BlockSummary| a.merge(b))
        .expect("n_paths >= 100 gives at least one block");

    let mut estimates = Vec::with_capacity(functionals.len() * levels.len());
    for (fi, &f) in functionals.iter().enumerate() {
        for (li, &n) in levels.iter().enumerate() {
            let finest = li + 1 == levels.len();
            let extrap = (finest && ratio.is_some()).then_some(&total.extrapolated[fi]);
            estimates.push(MonteCarloEstimate::from_moments(f, n, &total.moments[fi][li], extrap));
        }
    }
    Ok(SimulationReport { config: config.clone(), estimates, audit: total.audit })
}

/// Per-level estimates of the configured functionals.
pub fn estimate(config: &EstimatorConfig) -> Result<Vec<MonteCarloEstimate>> {
    simulate(config).map(|r| r.estimates)
}

/// Checks every per-sample inequality on every generated path; any
/// violation is an error carrying the offending seed and replicate.
pub fn sandwich_audit(config: &EstimatorConfig) -> Result<AuditReport> {
    simulate(config)?.audit.into_result()
}

/// Statistics of two ranges attached to each replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangePair {
    /// `max{r(0), r(π/2)}` of one path.
    MaxOrthogonal,
    /// `max{r(0), r'(0)}` over the replicate's path and an independent companion.
    MaxTwoPaths,
    /// `|r(0) − r'(0)|` over the replicate's path and an independent companion.
    AbsDifferenceTwoPaths,
}

impl RangePair {
    fn needs_companion(self) -> bool {
        !matches!(self, RangePair::MaxOrthogonal)
    }

    fn value(self, rx: f64, ry: f64, companion_rx: f64) -> f64 {
        match self {
            RangePair::MaxOrthogonal => rx.max(ry),
            RangePair::MaxTwoPaths => rx.max(companion_rx),
            RangePair::AbsDifferenceTwoPaths => (rx - companion_rx).abs(),
        }
    }
}

fn ranges(path: &crate::path::BrownianPath) -> (f64, f64) {
    crate::geometry::axis_ranges(path.points())
}

/// Finest-level estimate (with extrapolation) of a statistic of two ranges.
/// The replicate's own path is the one used by [`simulate`] for the same
/// seed; the companion comes from an independent stream domain.
pub fn estimate_range_pair(config: &EstimatorConfig, pair: RangePair) -> Result<MonteCarloEstimate> {
    config.validate()?;
    let levels = &config.step_levels;
    let k = levels.len();
    let ratio = (k >= 2).then(|| extrapolation_ratio(levels[k - 2], levels[k - 1]));

    let blocks: Vec<(Moments, Moments)> = config
        .blocks()
        .into_par_iter()
        .map(|(start, end)| -> Result<(Moments, Moments)> {
            let (mut fine, mut extrap) = (Moments::default(), Moments::default());
            for replicate in start..end {
                let own = sample_ladder(config.seed, DOMAIN_BASE, replicate, levels)?;
                let companion = if pair.needs_companion() {
                    Some(sample_ladder(config.seed, DOMAIN_COMPANION, replicate, levels)?)
                } else {
                    None
                };
                let values: Vec<f64> = (0..k)
                    .map(|li| {
                        let (rx, ry) = ranges(&own[li]);
                        let crx = companion.as_ref().map_or(0.0, |c| ranges(&c[li]).0);
                        pair.value(rx, ry, crx)
                    })
                    .collect();
                fine.push(values[k - 1]);
                if let Some(rho) = ratio {
                    extrap.push(extrapolate(values[k - 2], values[k - 1], rho));
                }
            }
            Ok((fine, extrap))
        })
        .collect::<Result<_>>()?;

    let (fine, extrap) =
        tree_reduce(&blocks, &|a: &(Moments, Moments), b: &(Moments, Moments)| (a.0.merge(&b.0), a.1.merge(&b.1)))
            .expect("at least one block");
    Ok(MonteCarloEstimate::from_moments(
        Functional::MaxTwoRanges,
        levels[k - 1],
        &fine,
        ratio.is_some().then_some(&extrap),
    ))
}

/// `E max{X₁, X₂}` for independent copies of `r(0)`, either from the two
/// orthogonal directions of one path or from two independent paths.
pub fn estimate_max_two_ranges(config: &EstimatorConfig, two_paths: bool) -> Result<MonteCarloEstimate> {
    estimate_range_pair(config, if two_paths { RangePair::MaxTwoPaths } else { RangePair::MaxOrthogonal })
}

/// Monte Carlo estimate of a probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityEstimate {
    pub x: f64,
    pub probability: f64,
    pub stderr: f64,
    pub n_paths: u64,
}

/// Estimates `Pr(Z < x)` for `Z = max_k |b(k/n)·e₀|` at each threshold.
pub fn sup_abs_cdf(n_paths: u64, n_steps: usize, seed: u64, thresholds: &[f64]) -> Result<Vec<ProbabilityEstimate>> {
    if n_paths == 0 {
        return Err(Error::Config("n_paths must be positive".into()));
    }
    PathConfig::new(n_steps, seed, 0).validate()?;
    let n_blocks = n_paths.div_ceil(BLOCK_SIZE);
    let counts: Vec<Vec<u64>> = (0..n_blocks)
        .into_par_iter()
        .map(|b| -> Result<Vec<u64>> {
            let mut c = vec![0u64; thresholds.len()];
            for replicate in b * BLOCK_SIZE..((b + 1) * BLOCK_SIZE).min(n_paths) {
                let z = sample_path(&PathConfig::new(n_steps, seed, replicate))?.sup_abs_x();
                for (ci, &x) in c.iter_mut().zip(thresholds) {
                    *ci += u64::from(z < x);
                }
            }
            Ok(c)
        })
        .collect::<Result<_>>()?;
    let mut total = vec![0u64; thresholds.len()];
    for c in &counts {
        total.iter_mut().zip(c).for_each(|(t, v)| *t += v);
    }
    Ok(thresholds
        .iter()
        .zip(total)
        .map(|(&x, hits)| {
            let p = hits as f64 / n_paths as f64;
            ProbabilityEstimate { x, probability: p, stderr: (p * (1.0 - p) / n_paths as f64).sqrt(), n_paths }
        })
        .collect())
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV row per functional and level; 17 significant digits.
pub fn estimates_to_csv(estimates: &[MonteCarloEstimate]) -> String {
    let mut out =
        String::from("functional,n_steps,n_paths,mean,stderr,ci95_low,ci95_high,extrapolated,extrapolated_stderr\n");
    for e in estimates {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            e.functional,
            e.n_steps,
            e.n_paths,
            fmt_f64(e.mean),
            fmt_f64(e.stderr),
            fmt_f64(e.ci95[0]),
            fmt_f64(e.ci95[1]),
            e.extrapolated.map(fmt_f64).unwrap_or_default(),
            e.extrapolated_stderr.map(fmt_f64).unwrap_or_default(),
        ));
    }
    out
}
