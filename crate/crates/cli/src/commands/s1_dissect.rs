use anyhow::Result;
use serde::Deserialize;
use serde_json::json;

use spectral_bounds::discrete_hodge::s1_case_study;
use spectral_bounds::dissection::NConvention;

use super::Outcome;
use crate::config::RunConfig;
use crate::output::{fmt_f64, num, OutDir};
use crate::schema::{bound_json, cover_json};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct S1Doc {
    #[serde(default = "default_n")]
    n: usize,
    #[serde(default = "default_overlap")]
    overlap_fraction: f64,
}

fn default_n() -> usize {
    64
}

fn default_overlap() -> f64 {
    0.125
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let doc: S1Doc = config.load(false)?;
    let r = s1_case_study(doc.n, doc.overlap_fraction)?;
    let passed = r.passed();
    let report = json!({
        "n": r.n,
        "overlap_fraction": num(r.overlap_fraction),
        "half_width": r.half_width,
        "spectra": {
            "mu_arcs": r.mu_arcs.iter().copied().map(num).collect::<Vec<_>>(),
            "mu_overlap": num(r.mu_overlap),
            "truth": r.truth_spectrum.iter().copied().map(num).collect::<Vec<_>>(),
        },
        "dims": {
            "overlap_kernel": r.overlap_kernel_dim,
            "N": r.bound.n.n,
        },
        "C_rho": num(r.c_rho),
        "cover": cover_json(&r.cover),
        "bound": bound_json(&r.bound, NConvention::Unordered),
        "mu_N": num(r.mu_n),
        "margin": num(r.margin),
        "n_matches_kernel": r.n_matches_kernel(),
        "passed": passed,
    });
    let rows: Vec<Vec<String>> = r
        .truth_spectrum
        .iter()
        .enumerate()
        .map(|(i, v)| vec![i.to_string(), fmt_f64(*v)])
        .collect();
    let out = OutDir::new(&config.out);
    out.write_json("s1.json", &report)?;
    out.write_csv("s1_spectrum.csv", &["index", "eigenvalue"], &rows)?;
    Ok(Outcome {
        passed,
        summary: format!(
            "n = {}: bound {} vs mu_N {} (margin {})",
            r.n, r.bound.mu_bound, r.mu_n, r.margin
        ),
    })
}
