use anyhow::Result;
use serde::Deserialize;
use serde_json::json;

use spectral_bounds::sturm_liouville::{
    cross_validate, solve_fd, solve_shooting, SlProblem, SpectrumResult, Window,
};
use spectral_bounds::tube_spectrum::DEFAULT_GRID_N;

use super::Outcome;
use crate::config::RunConfig;
use crate::output::{fmt_f64, num, OutDir};
use crate::schema::{boundary_json, spectrum_json, BoundaryDoc, PotentialDoc};

#[derive(Debug, Clone, Copy, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
enum SolverChoice {
    FiniteDifference,
    Shooting,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
struct WindowDoc {
    lo: f64,
    hi: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProblemDoc {
    potential: PotentialDoc,
    m0: f64,
    m1: f64,
    left: BoundaryDoc,
    right: BoundaryDoc,
    window: WindowDoc,
    #[serde(default = "default_grid")]
    grid_n: usize,
    #[serde(default = "default_method")]
    method: SolverChoice,
}

fn default_grid() -> usize {
    DEFAULT_GRID_N
}

fn default_method() -> SolverChoice {
    SolverChoice::FiniteDifference
}

fn csv_rows(r: &SpectrumResult) -> Vec<Vec<String>> {
    r.eigenvalues
        .iter()
        .zip(&r.error_estimates)
        .enumerate()
        .map(|(i, (v, e))| vec![(r.first_index + i).to_string(), fmt_f64(*v), fmt_f64(*e)])
        .collect()
}

pub fn run(config: &RunConfig, cross: bool) -> Result<Outcome> {
    let doc: ProblemDoc = config.load(true)?;
    let problem = SlProblem::new(
        doc.potential.build()?,
        doc.m0,
        doc.m1,
        doc.left.condition(),
        doc.right.condition(),
    )?;
    let window = Window::new(doc.window.lo, doc.window.hi)?;
    let mut report = json!({
        "problem": {
            "m0": num(doc.m0),
            "m1": num(doc.m1),
            "left": boundary_json(problem.left()),
            "right": boundary_json(problem.right()),
            "window": {"lo": num(window.lo), "hi": num(window.hi)},
        },
    });
    let (result, passed) = if cross {
        let cv = cross_validate(&problem, doc.grid_n, window)?;
        report["finite_difference"] = spectrum_json(&cv.fd);
        report["shooting"] = spectrum_json(&cv.shooting);
        report["agree"] = json!(cv.agree);
        report["max_discrepancy"] = num(cv.max_discrepancy);
        (cv.combined, cv.agree)
    } else {
        let r = match doc.method {
            SolverChoice::FiniteDifference => solve_fd(&problem, doc.grid_n, window)?,
            SolverChoice::Shooting => solve_shooting(&problem, window)?,
        };
        (r, true)
    };
    report["spectrum"] = spectrum_json(&result);

    let out = OutDir::new(&config.out);
    out.write_json("spectrum.json", &report)?;
    out.write_csv("spectrum.csv", &["index", "eigenvalue", "error"], &csv_rows(&result))?;
    Ok(Outcome {
        passed,
        summary: format!(
            "{} eigenvalues in ({}, {}){}",
            result.len(),
            window.lo,
            window.hi,
            if cross {
                if passed { ", solvers agree" } else { ", solvers DISAGREE" }
            } else {
                ""
            }
        ),
    })
}
