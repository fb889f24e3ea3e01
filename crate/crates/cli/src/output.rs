use std::fmt::Write as _;

use brownian_diameter::analytic::{GOptimum, PerimeterSqResult};
use brownian_diameter::mc::{estimates_to_csv, SimulationReport};
use brownian_diameter::verify::CriterionOutcome;
use brownian_diameter::{BoundsReport, BrownianPath};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

pub enum Report {
    Bounds(BoundsReport),
    Simulation(SimulationReport),
    Density(Vec<(f64, f64)>),
    Integral(PerimeterSqResult),
    Optimum { optimum: GOptimum, lower_bound: f64 },
    Verify(Vec<CriterionOutcome>),
    Path(BrownianPath),
}

/// 17 significant digits.
fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Serialize)]
struct DensityRow {
    r: f64,
    density: f64,
}

#[derive(Serialize)]
struct PathRow {
    t: f64,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct OptimumJson<'a> {
    #[serde(flatten)]
    optimum: &'a GOptimum,
    lower_bound: f64,
}

fn kv_csv(rows: &[(&str, f64)]) -> String {
    let mut out = String::from("quantity,value\n");
    for (k, v) in rows {
        let _ = writeln!(out, "{k},{}", num(*v));
    }
    out
}

fn kv_text(rows: &[(&str, f64)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (k, v) in rows {
        let _ = writeln!(out, "{k:<width$}  {v}");
    }
    out
}

fn bounds_rows(b: &BoundsReport) -> Vec<(&'static str, f64)> {
    let mut rows = vec![
        ("lower_basic", b.lower_basic),
        ("lower_improved", b.lower_improved),
        ("lower_sharper", b.lower_sharper),
        ("upper_improved", b.upper_improved),
        ("upper_basic", b.upper_basic),
        ("g_star", b.g_star),
        ("a_star", b.a_star),
        ("h_star", b.h_star),
        ("mean_abs_diff", b.mean_abs_diff),
        ("mean_abs_diff_error", b.mean_abs_diff_error),
        ("d1_sq_lower", b.d1_sq_lower),
        ("d1_sq_upper", b.d1_sq_upper),
        ("perimeter_sq", b.perimeter_sq),
        ("perimeter_sq_error", b.perimeter_sq_error),
        ("perimeter_sq_truncation_error", b.perimeter_sq_truncation_error),
        ("perimeter_sq_tolerance", b.perimeter_sq_tolerance),
        ("series_tail_tolerance", b.series_tail_tolerance),
        ("series_k_max", b.series_k_max as f64),
        ("r_min", b.r_min),
        ("r_max", b.r_max),
        ("mass_below_r_min", b.mass_below_r_min),
        ("mass_above_r_max", b.mass_above_r_max),
    ];
    if let Some(mc) = &b.mc_estimate {
        rows.push(("mc_diameter", mc.best_value()));
        rows.push(("mc_diameter_stderr", mc.best_stderr()));
    }
    rows
}

fn optimum_rows(o: &GOptimum, lower_bound: f64) -> Vec<(&'static str, f64)> {
    vec![("a_star", o.a), ("h_star", o.h), ("g_star", o.g), ("lower_bound", lower_bound)]
}

fn integral_rows(r: &PerimeterSqResult) -> Vec<(&'static str, f64)> {
    vec![
        ("perimeter_sq", r.value),
        ("abs_error", r.abs_error),
        ("truncation_error", r.truncation_error),
        ("evaluations", r.evaluations as f64),
    ]
}

fn path_rows(p: &BrownianPath) -> Vec<PathRow> {
    p.points().iter().enumerate().map(|(k, q)| PathRow { t: p.time(k), x: q.x, y: q.y }).collect()
}

fn json<T: Serialize + ?Sized>(v: &T) -> serde_json::Result<String> {
    serde_json::to_string_pretty(v).map(|s| s + "\n")
}

impl Report {
    pub fn render(&self, format: Format) -> serde_json::Result<String> {
        Ok(match (self, format) {
            (Report::Bounds(b), Format::Json) => json(b)?,
            (Report::Bounds(b), Format::Csv) => kv_csv(&bounds_rows(b)),
            (Report::Bounds(b), Format::Text) => kv_text(&bounds_rows(b)),

            (Report::Simulation(s), Format::Json) => json(s)?,
            (Report::Simulation(s), Format::Csv) => estimates_to_csv(&s.estimates),
            (Report::Simulation(s), Format::Text) => {
                let mut out = format!(
                    "{:<14} {:>7} {:>9} {:>12} {:>10} {:>12} {:>10}\n",
                    "functional", "steps", "paths", "mean", "stderr", "extrap", "stderr"
                );
                for e in &s.estimates {
                    let (x, xs) = match (e.extrapolated, e.extrapolated_stderr) {
                        (Some(x), Some(xs)) => (format!("{x:.6}"), format!("{xs:.6}")),
                        _ => (String::new(), String::new()),
                    };
                    let _ = writeln!(
                        out,
                        "{:<14} {:>7} {:>9} {:>12.6} {:>10.6} {:>12} {:>10}",
                        e.functional.name(),
                        e.n_steps,
                        e.n_paths,
                        e.mean,
                        e.stderr,
                        x,
                        xs
                    );
                }
                let a = &s.audit;
                let _ = writeln!(
                    out,
                    "audit: {} paths checked, {} perimeter, {} range, {} refinement violations",
                    a.paths_checked, a.perimeter_violations, a.range_violations, a.refinement_violations
                );
                out
            }

            (Report::Density(rows), Format::Json) => {
                json(&rows.iter().map(|&(r, density)| DensityRow { r, density }).collect::<Vec<_>>())?
            }
            (Report::Density(rows), Format::Csv) => {
                let mut out = String::from("r,density\n");
                for (r, f) in rows {
                    let _ = writeln!(out, "{},{}", num(*r), num(*f));
                }
                out
            }
            (Report::Density(rows), Format::Text) => {
                let mut out = String::new();
                for (r, f) in rows {
                    let _ = writeln!(out, "{r:10.6}  {f:.12e}");
                }
                out
            }

            (Report::Integral(r), Format::Json) => json(r)?,
            (Report::Integral(r), Format::Csv) => kv_csv(&integral_rows(r)),
            (Report::Integral(r), Format::Text) => kv_text(&integral_rows(r)),

            (Report::Optimum { optimum, lower_bound }, Format::Json) => {
                json(&OptimumJson { optimum, lower_bound: *lower_bound })?
            }
            (Report::Optimum { optimum, lower_bound }, Format::Csv) => kv_csv(&optimum_rows(optimum, *lower_bound)),
            (Report::Optimum { optimum, lower_bound }, Format::Text) => kv_text(&optimum_rows(optimum, *lower_bound)),

            (Report::Verify(outcomes), Format::Json) => json(outcomes)?,
            (Report::Verify(outcomes), Format::Csv) => {
                let mut out = String::from("id,name,passed,seconds,budget_seconds,detail\n");
                for o in outcomes {
                    let _ = writeln!(
                        out,
                        "{},{},{},{},{},\"{}\"",
                        o.id,
                        o.name,
                        o.passed,
                        num(o.seconds),
                        num(o.budget_seconds),
                        o.detail.replace('"', "\"\"")
                    );
                }
                out
            }
            (Report::Verify(outcomes), Format::Text) => outcomes.iter().map(|o| o.line() + "\n").collect(),

            (Report::Path(p), Format::Json) => json(&path_rows(p))?,
            (Report::Path(p), Format::Csv) => {
                let mut out = String::from("t,x,y\n");
                for r in path_rows(p) {
                    let _ = writeln!(out, "{},{},{}", num(r.t), num(r.x), num(r.y));
                }
                out
            }
            (Report::Path(p), Format::Text) => {
                path_rows(p).iter().map(|r| format!("{:.6} {:.12} {:.12}\n", r.t, r.x, r.y)).collect()
            }
        })
    }
}
