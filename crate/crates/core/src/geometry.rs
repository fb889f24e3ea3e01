//! Planar convex hulls and the functionals measured on them.
//!
//! Everything here works in plain `f64`. Orientation tests use the sign of
//! the floating-point cross product; collinear points are dropped from hulls.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    /// Projection onto the unit vector `(cos θ, sin θ)`, given as `(c, s)`.
    #[inline]
    pub fn dot_dir(&self, c: f64, s: f64) -> f64 {
        self.x * c + self.y * s
    }
}

/// Twice the signed area of the triangle `(o, a, b)`; positive for a left turn.
#[inline]
pub fn cross(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

#[inline]
pub fn dist_sq(a: Point2, b: Point2) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    dx * dx + dy * dy
}

/// Convex polygon with counter-clockwise vertices and no collinear
/// interior vertices. One- and two-vertex (degenerate) hulls are allowed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

impl ConvexPolygon {
    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn diameter(&self) -> f64 {
        diameter(self)
    }

    pub fn perimeter(&self) -> f64 {
        perimeter(self)
    }

    pub fn area(&self) -> f64 {
        area(self)
    }
}

fn lexicographic(a: &Point2, b: &Point2) -> Ordering {
    a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y))
}

fn check_points(points: &[Point2]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::Domain("point set is empty".into()));
    }
    if let Some(p) = points.iter().find(|p| !p.is_finite()) {
        return Err(Error::Domain(format!("non-finite point ({}, {})", p.x, p.y)));
    }
    Ok(())
}

/// Inputs larger than this are first filtered against a subsample hull.
const PREFILTER_MIN: usize = 256;

/// Approximate size of the subsample used by [`discard_interior`].
const PREFILTER_SAMPLE: usize = 512;

/// Monotone chain on points already sorted lexicographically and deduplicated.
fn monotone_chain(pts: &[Point2]) -> Vec<Point2> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(64);
    for &p in pts {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    // last point repeats the first
    hull.pop();
    hull
}

/// Drops points lying well inside the hull of an evenly strided subsample
/// (Akl–Toussaint style). Anything within a relative margin of that inner
/// hull's boundary is kept, so the final hull is unchanged.
fn discard_interior(points: &[Point2]) -> Vec<Point2> {
    let stride = (points.len() / PREFILTER_SAMPLE).max(1);
    let mut sample: Vec<Point2> = points.iter().step_by(stride).copied().collect();
    sample.sort_unstable_by(lexicographic);
    sample.dedup();
    let inner = monotone_chain(&sample);
    let m = inner.len();
    if m < 3 {
        return points.to_vec();
    }
    let (rx, ry) = axis_ranges(points);
    let scale = rx.max(ry);
    let margin = 1e-10 * scale * scale;
    let v0 = inner[0];
    let strictly_inside = |p: Point2| -> bool {
        // p must lie inside the fan at v0, then inside the edge of its wedge
        if cross(v0, inner[1], p) <= margin || cross(v0, inner[m - 1], p) >= -margin {
            return false;
        }
        let (mut lo, mut hi) = (1, m - 1);
        while hi - lo > 1 {
            let mid = (lo + hi) / 2;
            if cross(v0, inner[mid], p) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        cross(v0, inner[lo], p) > margin && cross(v0, inner[hi], p) < -margin && cross(inner[lo], inner[hi], p) > margin
    };
    points.iter().copied().filter(|&p| !strictly_inside(p)).collect()
}

/// Convex hull by Andrew's monotone chain.
///
/// The returned vertices are a subset of the input points, in
/// counter-clockwise order starting from the lexicographically smallest.
pub fn convex_hull(points: &[Point2]) -> Result<ConvexPolygon> {
    check_points(points)?;

    let mut pts = if points.len() > PREFILTER_MIN { discard_interior(points) } else { points.to_vec() };
    pts.sort_unstable_by(lexicographic);
    pts.dedup();
    Ok(ConvexPolygon { vertices: monotone_chain(&pts) })
}

/// Largest squared distance between two hull vertices, by rotating calipers.
pub fn diameter_sq(poly: &ConvexPolygon) -> f64 {
    let v = &poly.vertices;
    let n = v.len();
    match n {
        0 | 1 => return 0.0,
        2 => return dist_sq(v[0], v[1]),
        _ => {}
    }

    let mut best = 0.0_f64;
    let mut j = 1;
    for i in 0..n {
        let ni = (i + 1) % n;
        let (a, b) = (v[i], v[ni]);
        let mut cur = cross(a, b, v[j]);
        loop {
            let nj = (j + 1) % n;
            let next = cross(a, b, v[nj]);
            if next > cur {
                j = nj;
                cur = next;
            } else {
                if next == cur {
                    // edge parallel to (a, b): both ends of it are antipodal candidates
                    best = best.max(dist_sq(a, v[nj])).max(dist_sq(b, v[nj]));
                }
                break;
            }
        }
        best = best.max(dist_sq(a, v[j])).max(dist_sq(b, v[j]));
    }
    best
}

/// Diameter of a convex polygon; zero for a single vertex.
pub fn diameter(poly: &ConvexPolygon) -> f64 {
    diameter_sq(poly).sqrt()
}

/// Length of the closed boundary. A two-vertex hull is traversed both ways.
pub fn perimeter(poly: &ConvexPolygon) -> f64 {
    let v = &poly.vertices;
    if v.len() < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for i in 0..v.len() {
        total += dist_sq(v[i], v[(i + 1) % v.len()]).sqrt();
    }
    total
}

/// Enclosed area by the shoelace formula.
pub fn area(poly: &ConvexPolygon) -> f64 {
    let v = &poly.vertices;
    if v.len() < 3 {
        return 0.0;
    }
    let mut twice = 0.0;
    for i in 0..v.len() {
        let (p, q) = (v[i], v[(i + 1) % v.len()]);
        twice += p.x * q.y - q.x * p.y;
    }
    (0.5 * twice).max(0.0)
}

/// Width of the projection of `points` onto the direction `(cos θ, sin θ)`.
pub fn directional_range(points: &[Point2], theta: f64) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::Domain("point set is empty".into()));
    }
    if !theta.is_finite() {
        return Err(Error::Domain(format!("direction {theta} is not finite")));
    }
    let (s, c) = theta.sin_cos();
    Ok(projection_width(points, c, s))
}

fn projection_width(points: &[Point2], c: f64, s: f64) -> f64 {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        let t = p.dot_dir(c, s);
        lo = lo.min(t);
        hi = hi.max(t);
    }
    hi - lo
}

/// Extent along the two coordinate axes, `(r(0), r(π/2))`, computed from the
/// coordinates directly so no rounding of `cos(π/2)` leaks in.
pub fn axis_ranges(points: &[Point2]) -> (f64, f64) {
    let (mut x_lo, mut x_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_lo, mut y_hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in points {
        x_lo = x_lo.min(p.x);
        x_hi = x_hi.max(p.x);
        y_lo = y_lo.min(p.y);
        y_hi = y_hi.max(p.y);
    }
    (x_hi - x_lo, y_hi - y_lo)
}

/// Maximum of [`directional_range`] over `θ = kπ/grid_count`, `k < grid_count`.
///
/// The result lies in `[d·cos(π/(2·grid_count)), d]` where `d` is the diameter.
pub fn range_sup_over_grid(points: &[Point2], grid_count: usize) -> Result<f64> {
    if grid_count < 2 {
        return Err(Error::Domain(format!("grid_count must be at least 2, got {grid_count}")));
    }
    check_points(points)?;
    // the hull has the same support function and far fewer points
    let hull = convex_hull(points)?;
    let step = std::f64::consts::PI / grid_count as f64;
    Ok((0..grid_count)
        .map(|k| {
            let (s, c) = (k as f64 * step).sin_cos();
            projection_width(hull.vertices(), c, s)
        })
        .fold(0.0, f64::max))
}

/// Hull functionals of one point set.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HullStats {
    pub diameter: f64,
    /// Squared diameter exactly as compared by the calipers, before `sqrt`.
    pub diameter_sq: f64,
    pub perimeter: f64,
    pub area: f64,
    pub range_x: f64,
    pub range_y: f64,
    pub hull_vertices: usize,
}

impl HullStats {
    pub fn from_points(points: &[Point2]) -> Result<Self> {
        let hull = convex_hull(points)?;
        let d2 = diameter_sq(&hull);
        let (range_x, range_y) = axis_ranges(points);
        Ok(HullStats {
            diameter: d2.sqrt(),
            diameter_sq: d2,
            perimeter: perimeter(&hull),
            area: area(&hull),
            range_x,
            range_y,
            hull_vertices: hull.len(),
        })
    }

    /// `2 d ≤ ℓ ≤ π d`; vacuous for a single point.
    pub fn perimeter_sandwich_holds(&self) -> bool {
        if self.hull_vertices < 2 {
            return self.perimeter == 0.0 && self.diameter == 0.0;
        }
        2.0 * self.diameter <= self.perimeter && self.perimeter <= std::f64::consts::PI * self.diameter
    }

    /// `max(r(0), r(π/2)) ≤ d ≤ √(r(0)² + r(π/2)²)`, compared on squares so
    /// that the floating-point check is exact.
    pub fn range_sandwich_holds(&self) -> bool {
        let rx2 = self.range_x * self.range_x;
        let ry2 = self.range_y * self.range_y;
        rx2.max(ry2) <= self.diameter_sq && self.diameter_sq <= rx2 + ry2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

    fn unit_square() -> Vec<Point2> {
        vec![
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.5),
            Point2::new(0.0, 1.0),
            Point2::new(1.0, 0.0),
        ]
    }

    #[test]
    fn single_point_hull() {
        let hull = convex_hull(&[Point2::ORIGIN]).unwrap();
        assert_eq!(hull.vertices(), &[Point2::ORIGIN]);
        assert_eq!(diameter(&hull), 0.0);
        assert_eq!(perimeter(&hull), 0.0);
        assert_eq!(area(&hull), 0.0);
    }

    #[test]
    fn empty_and_nonfinite_rejected() {
        assert!(matches!(convex_hull(&[]), Err(Error::Domain(_))));
        assert!(matches!(convex_hull(&[Point2::new(f64::NAN, 0.0)]), Err(Error::Domain(_))));
        assert!(matches!(directional_range(&[], 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn square_with_interior_point() {
        let hull = convex_hull(&unit_square()).unwrap();
        assert_eq!(
            hull.vertices(),
            &[Point2::new(0.0, 0.0), Point2::new(1.0, 0.0), Point2::new(1.0, 1.0), Point2::new(0.0, 1.0)]
        );
        assert_eq!(diameter(&hull), SQRT_2);
        assert_eq!(perimeter(&hull), 4.0);
        assert_eq!(area(&hull), 1.0);
    }

    #[test]
    fn collinear_points_dropped() {
        let pts = [Point2::new(0.0, 0.0), Point2::new(1.0, 1.0), Point2::new(2.0, 2.0), Point2::new(0.5, 0.5)];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices(), &[Point2::new(0.0, 0.0), Point2::new(2.0, 2.0)]);
        assert_eq!(area(&hull), 0.0);

        let square_edges = [
            Point2::new(0.0, 0.0),
            Point2::new(0.5, 0.0),
            Point2::new(1.0, 0.0),
            Point2::new(1.0, 0.5),
            Point2::new(1.0, 1.0),
            Point2::new(0.0, 1.0),
        ];
        assert_eq!(convex_hull(&square_edges).unwrap().len(), 4);
    }

    #[test]
    fn segment() {
        let hull = convex_hull(&[Point2::new(3.0, 4.0), Point2::new(0.0, 0.0)]).unwrap();
        assert_eq!(diameter(&hull), 5.0);
        assert_eq!(perimeter(&hull), 10.0);
        assert_eq!(area(&hull), 0.0);
    }

    #[test]
    fn duplicate_points() {
        let pts = [Point2::new(1.0, 2.0); 5];
        assert_eq!(convex_hull(&pts).unwrap().len(), 1);
    }

    #[test]
    fn directional_range_axes_and_diagonal() {
        let seg = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        assert_eq!(directional_range(&seg, 0.0).unwrap(), 1.0);
        assert!(directional_range(&seg, FRAC_PI_2).unwrap().abs() < 1e-16);
        let r = directional_range(&unit_square(), FRAC_PI_4).unwrap();
        assert!((r - SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn grid_sup_small_cases() {
        assert_eq!(range_sup_over_grid(&[Point2::new(2.0, -1.0)], 7).unwrap(), 0.0);
        let seg = [Point2::new(0.0, 0.0), Point2::new(1.0, 0.0)];
        let r = range_sup_over_grid(&seg, 180).unwrap();
        assert!(r <= 1.0 && r >= (0.5_f64.to_radians()).cos());
        assert!(range_sup_over_grid(&seg, 1).is_err());
    }

    #[test]
    fn parallel_edges_rectangle() {
        // opposite edges parallel everywhere; the diagonal must still be found
        let pts = [Point2::new(0.0, 0.0), Point2::new(3.0, 0.0), Point2::new(3.0, 1.0), Point2::new(0.0, 1.0)];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(diameter_sq(&hull), 10.0);
    }

    #[test]
    fn regular_polygon_diameter() {
        for n in [3usize, 4, 5, 6, 7, 8, 64] {
            let pts: Vec<_> = (0..n)
                .map(|k| {
                    let t = 2.0 * PI * k as f64 / n as f64;
                    Point2::new(t.cos(), t.sin())
                })
                .collect();
            let hull = convex_hull(&pts).unwrap();
            let brute = pts.iter().flat_map(|a| pts.iter().map(move |b| dist_sq(*a, *b))).fold(0.0, f64::max);
            assert_eq!(diameter_sq(&hull), brute, "n = {n}");
        }
    }

    #[test]
    fn stats_sandwiches() {
        let s = HullStats::from_points(&unit_square()).unwrap();
        assert!(s.perimeter_sandwich_holds());
        assert!(s.range_sandwich_holds());
        assert_eq!((s.range_x, s.range_y), (1.0, 1.0));
        let p = HullStats::from_points(&[Point2::ORIGIN]).unwrap();
        assert_eq!(p, HullStats { hull_vertices: 1, ..Default::default() });
        assert!(p.perimeter_sandwich_holds() && p.range_sandwich_holds());
    }

    fn plain_hull(points: &[Point2]) -> Vec<Point2> {
        let mut pts = points.to_vec();
        pts.sort_unstable_by(lexicographic);
        pts.dedup();
        monotone_chain(&pts)
    }

    #[test]
    fn prefilter_keeps_hull() {
        use rand::{Rng, SeedableRng};
        use rand_distr::StandardNormal;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..40 {
            let n = 300 + 500 * trial;
            let mut walk = vec![Point2::ORIGIN];
            let mut cloud = Vec::with_capacity(n);
            for _ in 0..n {
                let last = *walk.last().unwrap();
                let dx: f64 = rng.sample(StandardNormal);
                let dy: f64 = rng.sample(StandardNormal);
                walk.push(Point2::new(last.x + dx, last.y + dy));
                cloud.push(Point2::new(rng.random::<f64>(), rng.random::<f64>()));
            }
            for pts in [&walk, &cloud] {
                assert_eq!(convex_hull(pts).unwrap().vertices(), plain_hull(pts).as_slice());
            }
        }
    }
}
