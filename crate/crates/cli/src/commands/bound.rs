use anyhow::Result;
use serde_json::json;

use spectral_bounds::dissection::{dirac_bound, laplacian_bound, NConvention};

use super::Outcome;
use crate::config::RunConfig;
use crate::output::{num, OutDir};
use crate::schema::{bound_json, cover_json, CoverDoc};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Laplacian,
    /// Set values are Dirac eigenvalues `λ`; the bound is on `λ_N`.
    Dirac,
}

pub fn run(config: &RunConfig, operator: Operator, convention: NConvention) -> Result<Outcome> {
    let doc: CoverDoc = config.load(true)?;
    let cover = doc.to_cover()?;
    let (result, bound, name) = match operator {
        Operator::Laplacian => {
            let r = laplacian_bound(&cover, convention)?;
            let b = r.mu_bound;
            (r, b, "laplacian")
        }
        Operator::Dirac => {
            let r = dirac_bound(&cover, convention)?;
            let b = r.lambda_bound;
            (r, b, "dirac")
        }
    };
    let mut report = bound_json(&result, convention);
    report["operator"] = json!(name);
    report["bound"] = num(bound);
    report["cover"] = cover_json(&cover);
    OutDir::new(&config.out).write_json("bound.json", &report)?;
    Ok(Outcome {
        passed: true,
        summary: format!("{name} bound {bound} for N = {}", result.n.n),
    })
}
