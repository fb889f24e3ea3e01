//! Expected diameter of planar Brownian motion.
//!
//! The crate is split along the lines of the computation:
//!
//! * [`geometry`]: convex hulls of finite planar point sets and their
//!   diameter, perimeter, area and directional range.
//! * [`path`]: seedable discretised planar Brownian paths on `[0, 1]`,
//!   including Lévy midpoint refinement for coupled multi-level runs.
//! * [`analytic`]: the range density of one-dimensional Brownian motion,
//!   the analytic lower and upper bounds on `E d₁` and the second moment
//!   of the hull perimeter.
//! * [`mc`]: parallel Monte Carlo estimation of hull functionals with
//!   standard errors, extrapolation in the step count and per-sample audits.
//! * [`verify`]: the acceptance criteria, runnable from tests and the CLI.

pub mod analytic;
pub mod error;
pub mod geometry;
pub mod mc;
pub mod optimize;
pub mod path;
pub mod quadrature;
pub mod verify;

pub use analytic::{BoundsReport, SeriesControl};
pub use error::{Error, Result};
pub use geometry::{ConvexPolygon, HullStats, Point2};
pub use mc::{EstimatorConfig, Functional, MonteCarloEstimate};
pub use path::{BrownianPath, PathConfig};

/// Seed used when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 0x5EED_0D1A_2017_0001;
