use anyhow::Result;
use serde::Deserialize;
use serde_json::{json, Value};

use spectral_bounds::geometry::DegenerationSchedule;
use spectral_bounds::tube_spectrum::{
    sweep, FamilySelection, SweepOptions, TubeEntry, DEFAULT_GRID_N, DEFAULT_R0_THRESHOLD, THRESHOLD_TOL,
};

use super::Outcome;
use crate::config::RunConfig;
use crate::output::{fmt_f64, num, OutDir};
use crate::schema::{geometry_json, mode_json, schedule_json};

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "lowercase")]
enum FamilyDoc {
    Abs1,
    Abs2,
    Both,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDoc {
    #[serde(rename = "D1", default = "one")]
    d1: f64,
    #[serde(rename = "D2", default = "one")]
    d2: f64,
    #[serde(rename = "E1", default = "one")]
    e1: f64,
    #[serde(rename = "E2", default = "one")]
    e2: f64,
    #[serde(rename = "R_grid")]
    r_grid: Vec<f64>,
    lambda_max: Option<f64>,
    r0_threshold: Option<f64>,
    family: Option<FamilyDoc>,
    #[serde(default)]
    include_zero_mode: bool,
    grid_n: Option<usize>,
    #[serde(default = "one")]
    threshold: f64,
}

fn entry_json(e: &TubeEntry) -> Value {
    let mut v = mode_json(e.mode, e.family);
    v["eigenvalue"] = num(e.eigenvalue);
    v["error_estimate"] = num(e.error_estimate);
    v["fd_eigenvalue"] = num(e.fd_eigenvalue);
    v["agree"] = json!(e.agree);
    v
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let doc: SweepDoc = config.load(true)?;
    let schedule = DegenerationSchedule::new(doc.d1, doc.d2, doc.e1, doc.e2, doc.r_grid.clone())?;
    let options = SweepOptions {
        lambda_max: doc.lambda_max.unwrap_or(2.0),
        r0_threshold: doc.r0_threshold.unwrap_or(DEFAULT_R0_THRESHOLD),
        family: match doc.family.unwrap_or(FamilyDoc::Both) {
            FamilyDoc::Abs1 => FamilySelection::Abs1,
            FamilyDoc::Abs2 => FamilySelection::Abs2,
            FamilyDoc::Both => FamilySelection::Both,
        },
        include_zero_mode: doc.include_zero_mode,
        grid_n: doc.grid_n.unwrap_or(DEFAULT_GRID_N),
    };
    if !doc.threshold.is_finite() {
        anyhow::bail!("threshold must be finite");
    }

    let mut table = Vec::new();
    let mut failures = Vec::new();
    let mut rows = Vec::new();
    let (mut computed, mut passed) = (0usize, 0usize);
    for row in sweep(&schedule, &options) {
        match &row.outcome {
            Ok(ok) => {
                let r0 = ok.r0.r0;
                for e in &ok.spectrum.entries {
                    table.push(vec![
                        fmt_f64(row.radius),
                        fmt_f64(r0),
                        e.mode.r.to_string(),
                        e.mode.s.to_string(),
                        e.family.name().to_string(),
                        fmt_f64(e.eigenvalue),
                        fmt_f64(e.error_estimate),
                    ]);
                }
                let pass = ok.spectrum.passes_threshold(doc.threshold);
                computed += 1;
                passed += pass as usize;
                rows.push(json!({
                    "R": num(row.radius),
                    "status": "ok",
                    "geometry": geometry_json(&ok.geometry),
                    "r0_achieved_inf": num(ok.r0.achieved_inf),
                    "m_max": ok.spectrum.truncation_certificate.m_max,
                    "entries": ok.spectrum.entries.len(),
                    "min_positive_offzero": entry_json(&ok.spectrum.min_positive_offzero),
                    "passed": pass,
                }));
            }
            Err(reason) => {
                failures.push(vec![fmt_f64(row.radius), reason.clone()]);
                rows.push(json!({"R": num(row.radius), "status": "failed", "reason": reason}));
            }
        }
    }

    let all_passed = passed == computed;
    let summary = json!({
        "schedule": schedule_json(&schedule),
        "lambda_max": num(options.lambda_max),
        "r0_threshold": num(options.r0_threshold),
        "threshold": num(doc.threshold),
        "tolerance": num(THRESHOLD_TOL),
        "rows": rows,
        "computed": computed,
        "failed": failures.len(),
        "all_passed": all_passed,
    });
    let out = OutDir::new(&config.out);
    out.write_csv(
        "sweep.csv",
        &["R", "r0", "mode_r", "mode_s", "family", "eigenvalue", "error_estimate"],
        &table,
    )?;
    out.write_csv("failures.csv", &["R", "reason"], &failures)?;
    out.write_json("summary.json", &summary)?;
    Ok(Outcome {
        passed: all_passed,
        summary: format!(
            "{passed}/{computed} radii pass the threshold {}; {} failed to run",
            doc.threshold,
            failures.len()
        ),
    })
}
