//! Derivative-free maximisation in two variables: a rectangular grid scan
//! followed by Nelder–Mead refinement.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maximum {
    pub x: [f64; 2],
    pub value: f64,
    pub evaluations: usize,
}

/// Axis-aligned box with a grid spacing per axis. The grid starts one step
/// above the lower corner, so open lower limits are never evaluated.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub lower: [f64; 2],
    pub upper: [f64; 2],
    pub step: [f64; 2],
}

impl GridSpec {
    fn axis(&self, i: usize) -> impl Iterator<Item = f64> + '_ {
        let n = ((self.upper[i] - self.lower[i]) / self.step[i]).round() as usize;
        (1..=n).map(move |k| self.lower[i] + k as f64 * self.step[i])
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        (0..2).all(|i| x[i] > self.lower[i] && x[i] <= self.upper[i])
    }
}

/// Best grid point; ties go to the first one visited (row-major in `x[0]`).
pub fn grid_max<F: Fn([f64; 2]) -> f64>(f: &F, grid: &GridSpec) -> Maximum {
    let mut best = Maximum { x: [f64::NAN; 2], value: f64::NEG_INFINITY, evaluations: 0 };
    for a in grid.axis(0) {
        for b in grid.axis(1) {
            let v = f([a, b]);
            best.evaluations += 1;
            if v > best.value {
                best.value = v;
                best.x = [a, b];
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub initial_step: [f64; 2],
    /// Stop once every vertex is within this distance of the best one...
    pub x_tol: f64,
    /// ...and the vertex values differ by at most this much.
    pub f_tol: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions { initial_step: [0.05, 0.05], x_tol: 1e-10, f_tol: 1e-15, max_iterations: 5000 }
    }
}

fn lerp(a: [f64; 2], b: [f64; 2], t: f64) -> [f64; 2] {
    [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
}

/// Nelder–Mead maximisation from `start` with the standard coefficients
/// (reflection 1, expansion 2, contraction ½, shrink ½). Points outside
/// `domain` are scored as −∞.
pub fn nelder_mead_max<F: Fn([f64; 2]) -> f64>(
    f: &F,
    start: [f64; 2],
    domain: &GridSpec,
    opts: &NelderMeadOptions,
) -> Maximum {
    let mut evaluations = 0usize;
    let mut eval = |x: [f64; 2]| {
        evaluations += 1;
        if domain.contains(x) {
            f(x)
        } else {
            f64::NEG_INFINITY
        }
    };

    let mut simplex = [start, [start[0] + opts.initial_step[0], start[1]], [start[0], start[1] + opts.initial_step[1]]];
    let mut values = simplex.map(&mut eval);

    for _ in 0..opts.max_iterations {
        // order best to worst
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
        simplex = idx.map(|i| simplex[i]);
        values = idx.map(|i| values[i]);

        let spread_x =
            simplex[1..].iter().map(|p| (p[0] - simplex[0][0]).hypot(p[1] - simplex[0][1])).fold(0.0, f64::max);
        if spread_x < opts.x_tol && (values[0] - values[2]).abs() <= opts.f_tol {
            break;
        }

        let centroid = lerp(simplex[0], simplex[1], 0.5);
        let reflected = lerp(simplex[2], centroid, 2.0);
        let fr = eval(reflected);
        if fr > values[0] {
            let expanded = lerp(simplex[2], centroid, 3.0);
            let fe = eval(expanded);
            if fe > fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
        } else if fr > values[1] {
            simplex[2] = reflected;
            values[2] = fr;
        } else {
            // outside contraction when the reflection beat the worst vertex
            let target = if fr > values[2] { reflected } else { simplex[2] };
            let contracted = lerp(centroid, target, 0.5);
            let fc = eval(contracted);
            if fc > values[2] && fc >= fr {
                simplex[2] = contracted;
                values[2] = fc;
            } else {
                for k in 1..3 {
                    simplex[k] = lerp(simplex[0], simplex[k], 0.5);
                    values[k] = eval(simplex[k]);
                }
            }
        }
    }

    let best = (0..3).max_by(|&i, &j| values[i].total_cmp(&values[j])).expect("three vertices");
    Maximum { x: simplex[best], value: values[best], evaluations }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOX: GridSpec = GridSpec { lower: [-5.0, -5.0], upper: [5.0, 5.0], step: [0.1, 0.1] };

    #[test]
    fn quadratic_peak() {
        let f = |x: [f64; 2]| -(x[0] - 1.234).powi(2) - 3.0 * (x[1] + 0.5).powi(2) - 0.5 * x[0] * x[1];
        let g = grid_max(&f, &BOX);
        assert_eq!(g.evaluations, 100 * 100);
        let m = nelder_mead_max(&f, g.x, &BOX, &NelderMeadOptions::default());
        // stationary point of the quadratic
        let det = 2.0 * 6.0 - 0.25;
        let x0 = (2.0 * 1.234 * 6.0 - 0.5 * (-3.0)) / det;
        let x1 = (2.0 * (-3.0) - 0.5 * 2.0 * 1.234) / det;
        assert!((m.x[0] - x0).abs() < 1e-7 && (m.x[1] - x1).abs() < 1e-7, "{:?}", m.x);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: [f64; 2]| -((1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2));
        let m = nelder_mead_max(&f, [-1.2, 1.0], &BOX, &NelderMeadOptions::default());
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] - 1.0).abs() < 1e-6, "{:?}", m.x);
    }

    #[test]
    fn stays_in_domain() {
        let f = |x: [f64; 2]| x[0] + x[1];
        let m = nelder_mead_max(&f, [4.0, 4.0], &BOX, &NelderMeadOptions::default());
        assert!(BOX.contains(m.x));
        assert!(m.value > 9.99);
    }
}
