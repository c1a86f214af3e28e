use anyhow::Result;
use serde::Deserialize;
use serde_json::{json, Value};

use spectral_bounds::ode_compare::{run_suite, SuiteCaseReport, RICCATI_TOL, SLOPE_TOL};

use super::Outcome;
use crate::config::RunConfig;
use crate::output::{fmt_f64, num, OutDir};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct SuiteDoc {
    #[serde(default = "default_seed")]
    seed: u64,
    #[serde(default = "default_count")]
    count: usize,
}

fn default_seed() -> u64 {
    7
}

fn default_count() -> usize {
    20
}

fn case_json(i: usize, r: &SuiteCaseReport) -> Value {
    let c = &r.case;
    json!({
        "case": i,
        "k": num(c.k),
        "alpha": num(c.alpha),
        "m1": num(c.m1),
        "potential": {
            "base": num(c.potential.base),
            "terms": c.potential.terms.iter().map(|(a, w, p)| vec![num(*a), num(*w), num(*p)]).collect::<Vec<_>>(),
        },
        "riccati_min_margin": num(r.riccati.min_margin),
        "riccati_checked": r.riccati.checked,
        "riccati_skipped": r.riccati.skipped,
        "slope": num(r.slope.slope),
        "slope_threshold": num(r.slope.threshold),
        "growth_delta": num(r.growth.delta),
        "growth_min_margin": num(r.growth.min_margin),
        "growth_no_return": r.growth.no_return,
        "passed": r.passed(),
    })
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let mut doc: SuiteDoc = config.load(false)?;
    if let Some(seed) = config.seed {
        doc.seed = seed;
    }
    let reports = run_suite(doc.seed, doc.count)?;
    let passed = reports.iter().filter(|r| r.passed()).count();
    let report = json!({
        "seed": doc.seed,
        "count": doc.count,
        "riccati_tol": num(RICCATI_TOL),
        "slope_tol": num(SLOPE_TOL),
        "passed": passed,
        "cases": reports.iter().enumerate().map(|(i, r)| case_json(i, r)).collect::<Vec<_>>(),
    });
    let rows: Vec<Vec<String>> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| {
            vec![
                i.to_string(),
                fmt_f64(r.case.k),
                fmt_f64(r.case.alpha),
                fmt_f64(r.riccati.min_margin),
                fmt_f64(r.slope.slope),
                fmt_f64(r.slope.threshold),
                fmt_f64(r.growth.min_margin),
                r.passed().to_string(),
            ]
        })
        .collect();
    let out = OutDir::new(&config.out);
    out.write_json("ode.json", &report)?;
    out.write_csv(
        "ode.csv",
        &["case", "k", "alpha", "riccati_min_margin", "slope", "slope_threshold", "growth_min_margin", "passed"],
        &rows,
    )?;
    Ok(Outcome {
        passed: passed == reports.len(),
        summary: format!("{passed}/{} cases pass (seed {})", reports.len(), doc.seed),
    })
}
