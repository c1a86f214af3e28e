use anyhow::{bail, Result};
use serde::Deserialize;
use serde_json::json;

use spectral_bounds::dissection::berger_scaling;

use super::Outcome;
use crate::config::RunConfig;
use crate::output::{fmt_f64, num, OutDir};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BergerDoc {
    #[serde(default = "one")]
    a: f64,
    #[serde(default = "one")]
    b: f64,
    #[serde(default = "two")]
    m: u32,
    #[serde(default = "default_epsilon")]
    epsilon: f64,
    #[serde(default)]
    t_min: f64,
    #[serde(default = "default_t_max")]
    t_max: f64,
    #[serde(default = "one")]
    t_step: f64,
    #[serde(default = "default_thresholds")]
    thresholds: Vec<f64>,
}

fn one() -> f64 {
    1.0
}

fn two() -> u32 {
    2
}

fn default_epsilon() -> f64 {
    0.1
}

fn default_t_max() -> f64 {
    200.0
}

fn default_thresholds() -> Vec<f64> {
    vec![10.0]
}

/// `t_min + i t_step` up to `t_max`, computed by multiplication.
fn grid(doc: &BergerDoc) -> Result<Vec<f64>> {
    if !(doc.t_step > 0.0 && doc.t_step.is_finite() && doc.t_min.is_finite() && doc.t_max >= doc.t_min) {
        bail!("t grid needs t_step > 0 and t_min <= t_max");
    }
    let count = ((doc.t_max - doc.t_min) / doc.t_step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        bail!("t grid has {count} points");
    }
    Ok((0..count).map(|i| doc.t_min + i as f64 * doc.t_step).collect())
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let doc: BergerDoc = config.load(false)?;
    let t = grid(&doc)?;
    let curve = berger_scaling(doc.a, doc.b, doc.m, doc.epsilon, &t, &doc.thresholds)?;
    let crossings: Vec<_> = curve
        .crossings
        .iter()
        .map(|(lam, t)| json!({"Lambda": num(*lam), "t_star": t.map_or(serde_json::Value::Null, num)}))
        .collect();
    let report = json!({
        "a": num(doc.a),
        "b": num(doc.b),
        "m": doc.m,
        "epsilon": num(doc.epsilon),
        "t_min": num(doc.t_min),
        "t_max": num(doc.t_max),
        "t_step": num(doc.t_step),
        "crossings": crossings,
        "strictly_increasing": curve.strictly_increasing,
    });
    let rows: Vec<Vec<String>> = curve.t.iter().zip(&curve.value).map(|(t, v)| vec![fmt_f64(*t), fmt_f64(*v)]).collect();
    let out = OutDir::new(&config.out);
    out.write_json("berger.json", &report)?;
    out.write_csv("berger.csv", &["t", "value"], &rows)?;
    let found = curve.crossings.iter().filter(|(_, t)| t.is_some()).count();
    Ok(Outcome {
        passed: curve.strictly_increasing,
        summary: format!(
            "{found}/{} thresholds crossed on the grid{}",
            curve.crossings.len(),
            if curve.strictly_increasing { "" } else { "; curve NOT strictly increasing" }
        ),
    })
}
