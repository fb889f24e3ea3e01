//! Discretised standard planar Brownian motion on `[0, 1]`.
//!
//! # Random streams
//!
//! Every path is drawn from its own ChaCha8 stream. The 256-bit key is four
//! SplitMix64 outputs seeded with `seed ^ domain`, where `domain` separates
//! independent uses of one seed (base increments, each refinement pass, the
//! companion path of a pair). The ChaCha stream id is the replicate index.
//! Replicates are therefore independent and can be generated in any order.
//!
//! Normal variates come from `rand_distr::StandardNormal` (the ziggurat
//! method) drawn as x then y for each step. The bitstream is pinned by the
//! versions recorded in `Cargo.lock`; `tests::golden_bitstream` guards it.
//!
//! # Refinement
//!
//! [`BrownianPath::refine`] halves the time step by inserting Brownian
//! bridge midpoints: between `b(t)` and `b(t + Δ)` it places
//! `(b(t) + b(t + Δ)) / 2 + √(Δ/4)·N`. The existing points are kept bit for
//! bit, so a coarse path is an exact subsample of every refinement of it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HullStats, Point2};

/// Stream domain of the base increments drawn by [`sample_path`].
pub const DOMAIN_BASE: u64 = 0;
/// Stream domain of a second, independent path paired with each replicate.
pub const DOMAIN_COMPANION: u64 = 0xC0C0_0000_0000_0000;
/// Refinement pass `k` (counted from the base path) uses `DOMAIN_REFINE + k`.
pub const DOMAIN_REFINE: u64 = 0x4EF1_0000_0000_0000;

/// Mixing step of SplitMix64.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Counter-based generator for `(seed, domain, replicate)`.
pub fn stream_rng(seed: u64, domain: u64, replicate: u64) -> ChaCha8Rng {
    let mut state = seed ^ domain;
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replicate);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathConfig {
    pub n_steps: usize,
    pub seed: u64,
    pub replicate_index: u64,
}

impl PathConfig {
    pub fn new(n_steps: usize, seed: u64, replicate_index: u64) -> Self {
        PathConfig { n_steps, seed, replicate_index }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_steps == 0 {
            return Err(Error::Config("n_steps must be at least 1".into()));
        }
        Ok(())
    }
}

/// Points `b(k / n)` for `k = 0..=n`, starting at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianPath {
    points: Vec<Point2>,
}

impl BrownianPath {
    /// Builds a path from explicit points. The first point must be the
    /// origin and there must be at least one step.
    pub fn from_points(points: Vec<Point2>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::Config("a path needs at least two points".into()));
        }
        if points[0] != Point2::ORIGIN {
            return Err(Error::Domain("a path must start at the origin".into()));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::Domain("path has non-finite coordinates".into()));
        }
        Ok(BrownianPath { points })
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn n_steps(&self) -> usize {
        self.points.len() - 1
    }

    /// Time of point `k`.
    pub fn time(&self, k: usize) -> f64 {
        k as f64 / self.n_steps() as f64
    }

    /// Doubles the number of steps by Brownian bridge midpoint insertion.
    pub fn refine<R: Rng + ?Sized>(&self, rng: &mut R) -> BrownianPath {
        let half_sd = (0.25 / self.n_steps() as f64).sqrt();
        let mut out = Vec::with_capacity(2 * self.points.len() - 1);
        out.push(self.points[0]);
        for w in self.points.windows(2) {
            let zx: f64 = rng.sample(StandardNormal);
            let zy: f64 = rng.sample(StandardNormal);
            out.push(Point2::new(0.5 * (w[0].x + w[1].x) + half_sd * zx, 0.5 * (w[0].y + w[1].y) + half_sd * zy));
            out.push(w[1]);
        }
        BrownianPath { points: out }
    }

    /// Maximum of `|x|` along the path, a discretisation of `sup |b·e₀|`.
    pub fn sup_abs_x(&self) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(p.x.abs()))
    }
}

fn random_walk<R: Rng + ?Sized>(n_steps: usize, rng: &mut R) -> Vec<Point2> {
    let sd = (1.0 / n_steps as f64).sqrt();
    let mut points = Vec::with_capacity(n_steps + 1);
    let mut cur = Point2::ORIGIN;
    points.push(cur);
    for _ in 0..n_steps {
        let zx: f64 = rng.sample(StandardNormal);
        let zy: f64 = rng.sample(StandardNormal);
        cur = Point2::new(cur.x + sd * zx, cur.y + sd * zy);
        points.push(cur);
    }
    points
}

/// Draws a path with i.i.d. `N(0, 1/n)` coordinate increments.
pub fn sample_path(config: &PathConfig) -> Result<BrownianPath> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, DOMAIN_BASE, config.replicate_index);
    Ok(BrownianPath { points: random_walk(config.n_steps, &mut rng) })
}

/// Like [`sample_path`] but from an arbitrary stream domain.
pub fn sample_path_in_domain(config: &PathConfig, domain: u64) -> Result<BrownianPath> {
    config.validate()?;
    let mut rng = stream_rng(config.seed, domain, config.replicate_index);
    Ok(BrownianPath { points: random_walk(config.n_steps, &mut rng) })
}

/// Checks that `levels` is a strictly increasing list of powers of two.
/// Returns the number of halvings between consecutive levels.
pub fn refinement_schedule(levels: &[usize]) -> Result<Vec<u32>> {
    if levels.is_empty() {
        return Err(Error::Config("at least one step level is required".into()));
    }
    if let Some(bad) = levels.iter().find(|n| !n.is_power_of_two()) {
        return Err(Error::Config(format!("step level {bad} is not a positive power of two")));
    }
    levels
        .windows(2)
        .map(|w| {
            let (lo, hi) = (w[0], w[1]);
            if hi <= lo {
                Err(Error::Config(format!("step levels {lo}, {hi} are not increasing")))
            } else {
                Ok((hi / lo).trailing_zeros())
            }
        })
        .collect()
}

/// The same Brownian path at every requested step level.
///
/// The coarsest level is [`sample_path_in_domain`]; finer levels come from
/// repeated [`BrownianPath::refine`], one stream per refinement pass.
pub fn sample_ladder(seed: u64, domain: u64, replicate: u64, levels: &[usize]) -> Result<Vec<BrownianPath>> {
    let schedule = refinement_schedule(levels)?;
    let base = sample_path_in_domain(&PathConfig::new(levels[0], seed, replicate), domain)?;
    let mut out = Vec::with_capacity(levels.len());
    out.push(base);
    let mut pass = 0u64;
    for halvings in schedule {
        let mut cur = out.last().expect("non-empty").clone();
        for _ in 0..halvings {
            let mut rng = stream_rng(seed, domain.wrapping_add(DOMAIN_REFINE).wrapping_add(pass), replicate);
            cur = cur.refine(&mut rng);
            pass += 1;
        }
        out.push(cur);
    }
    Ok(out)
}

/// Hull functionals of a path's trace.
pub fn path_hull_stats(path: &BrownianPath) -> HullStats {
    HullStats::from_points(&path.points).expect("a path is non-empty and finite")
}
