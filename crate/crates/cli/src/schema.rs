//! JSON documents shared by several subcommands.

use std::collections::BTreeMap;

use anyhow::{anyhow, bail, Context, Result};
use serde::Deserialize;
use serde_json::{json, Map, Value};

use spectral_bounds::dissection::{BoundResult, CoverSpec, NConvention};
use spectral_bounds::geometry::{DegenerationSchedule, TubeGeometry};
use spectral_bounds::ode_compare::SmoothPotential;
use spectral_bounds::sturm_liouville::{BoundaryCondition, Method, Potential, SpectrumResult};
use spectral_bounds::torus_modes::ModeIndex;
use spectral_bounds::tube_spectrum::Family;

use crate::output::num;

/// `{"mu_set", "adjacency", "mu_pair": {"i-j"}, "C_rho", "h_pair": {"i-j"},
/// "h_triple": {"i-j-k"}, "h_set"}`
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverDoc {
    pub mu_set: Vec<f64>,
    pub adjacency: Vec<Vec<usize>>,
    #[serde(default)]
    pub mu_pair: BTreeMap<String, f64>,
    #[serde(rename = "C_rho")]
    pub c_rho: f64,
    #[serde(default)]
    pub h_pair: BTreeMap<String, u64>,
    #[serde(default)]
    pub h_triple: BTreeMap<String, u64>,
    #[serde(default)]
    pub h_set: Option<Vec<u64>>,
}

fn parse_key<const K: usize>(key: &str) -> Result<[usize; K]> {
    let parts: Vec<&str> = key.split('-').collect();
    if parts.len() != K {
        bail!("key `{key}` must have {K} indices joined by '-'");
    }
    let mut out = [0; K];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.trim().parse().with_context(|| format!("key `{key}` has a non-integer index"))?;
    }
    Ok(out)
}

impl CoverDoc {
    pub fn to_cover(&self) -> Result<CoverSpec> {
        let pairs = self
            .mu_pair
            .iter()
            .map(|(k, v)| parse_key::<2>(k).map(|[i, j]| ((i, j), *v)))
            .collect::<Result<Vec<_>>>()?;
        let h_pair = self
            .h_pair
            .iter()
            .map(|(k, v)| parse_key::<2>(k).map(|[i, j]| ((i, j), *v)))
            .collect::<Result<Vec<_>>>()?;
        let h_triple = self
            .h_triple
            .iter()
            .map(|(k, v)| parse_key::<3>(k).map(|[i, j, l]| ((i, j, l), *v)))
            .collect::<Result<Vec<_>>>()?;
        let mut cover = CoverSpec::new(self.mu_set.clone(), self.adjacency.clone(), pairs, self.c_rho)?
            .with_h_pair(h_pair)?
            .with_h_triple(h_triple)?;
        if let Some(h) = &self.h_set {
            cover = cover.with_h_set(h.clone())?;
        }
        Ok(cover)
    }
}

pub fn cover_json(cover: &CoverSpec) -> Value {
    let pairs: Map<String, Value> = cover
        .mu_pairs()
        .iter()
        .map(|((i, j), v)| (format!("{i}-{j}"), num(*v)))
        .collect();
    let h_pair: Map<String, Value> = cover
        .h_pairs()
        .iter()
        .map(|((i, j), d)| (format!("{i}-{j}"), json!(d)))
        .collect();
    let h_triple: Map<String, Value> = cover
        .h_triples()
        .iter()
        .map(|((i, j, k), d)| (format!("{i}-{j}-{k}"), json!(d)))
        .collect();
    let mut doc = json!({
        "mu_set": cover.mu_set().iter().copied().map(num).collect::<Vec<_>>(),
        "adjacency": cover.adjacency(),
        "mu_pair": pairs,
        "C_rho": num(cover.c_rho()),
        "h_pair": h_pair,
        "h_triple": h_triple,
    });
    if let Some(h) = cover.h_set() {
        doc["h_set"] = json!(h);
    }
    doc
}

pub fn convention_name(c: NConvention) -> &'static str {
    match c {
        NConvention::Unordered => "unordered",
        NConvention::Literal => "literal",
    }
}

pub fn bound_json(result: &BoundResult, convention: NConvention) -> Value {
    json!({
        "mu_bound": num(result.mu_bound),
        "lambda_bound": num(result.lambda_bound),
        "N": result.n.n,
        "N1": result.n.n1,
        "N2": result.n.n2,
        "n_convention": convention_name(convention),
        "per_set_terms": result.per_set_terms.iter().copied().map(num).collect::<Vec<_>>(),
    })
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum BoundaryDoc {
    Dirichlet,
    Neumann,
    Robin { beta: f64 },
}

impl BoundaryDoc {
    pub fn condition(self) -> BoundaryCondition {
        match self {
            BoundaryDoc::Dirichlet => BoundaryCondition::Dirichlet,
            BoundaryDoc::Neumann => BoundaryCondition::neumann(),
            BoundaryDoc::Robin { beta } => BoundaryCondition::robin(beta),
        }
    }
}

pub fn boundary_json(bc: BoundaryCondition) -> Value {
    match bc {
        BoundaryCondition::Dirichlet => json!({"type": "dirichlet"}),
        BoundaryCondition::Robin { beta } => json!({"type": "robin", "beta": num(beta)}),
    }
}

/// Potentials accepted by `sl-solve`.
#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum PotentialDoc {
    Constant { value: f64 },
    /// `Σ c_i u^i`
    Polynomial { coefficients: Vec<f64> },
    /// `base + Σ amp (1 + sin(omega u + phase))`, terms as `[amp, omega, phase]`.
    Smooth { base: f64, terms: Vec<[f64; 3]> },
}

#[derive(Debug, Clone)]
pub enum CliPotential {
    Constant(f64),
    Polynomial(Vec<f64>),
    Smooth(SmoothPotential),
}

impl Potential for CliPotential {
    fn eval(&self, u: f64) -> f64 {
        match self {
            CliPotential::Constant(c) => *c,
            CliPotential::Polynomial(c) => c.iter().rev().fold(0.0, |acc, x| acc * u + x),
            CliPotential::Smooth(p) => p.eval(u),
        }
    }
}

impl PotentialDoc {
    pub fn build(&self) -> Result<CliPotential> {
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        Ok(match self {
            PotentialDoc::Constant { value } if value.is_finite() => CliPotential::Constant(*value),
            PotentialDoc::Polynomial { coefficients } if finite(coefficients) => {
                CliPotential::Polynomial(coefficients.clone())
            }
            PotentialDoc::Smooth { base, terms } if base.is_finite() && terms.iter().all(|t| finite(t)) => {
                CliPotential::Smooth(SmoothPotential {
                    base: *base,
                    terms: terms.iter().map(|t| (t[0], t[1], t[2])).collect(),
                })
            }
            _ => return Err(anyhow!("potential coefficients must be finite")),
        })
    }
}

pub fn method_name(m: Method) -> &'static str {
    match m {
        Method::FiniteDifference => "finite_difference",
        Method::Shooting => "shooting",
        Method::CrossValidated => "cross_validated",
    }
}

pub fn spectrum_json(r: &SpectrumResult) -> Value {
    json!({
        "method": method_name(r.method),
        "first_index": r.first_index,
        "grid_n": r.grid_n,
        "eigenvalues": r.eigenvalues.iter().copied().map(num).collect::<Vec<_>>(),
        "error_estimates": r.error_estimates.iter().copied().map(num).collect::<Vec<_>>(),
    })
}

/// `R, r0, R0, epsilon, rho`; `r0` is `null` when unset.
pub fn geometry_json(g: &TubeGeometry) -> Value {
    json!({
        "R": num(g.radius()),
        "r0": g.inner_opt().map_or(Value::Null, num),
        "R0": num(g.outer()),
        "epsilon": num(g.epsilon()),
        "rho": num(g.rho()),
    })
}

pub fn schedule_json(s: &DegenerationSchedule) -> Value {
    let (d1, d2, e1, e2) = s.constants();
    json!({
        "D1": num(d1),
        "D2": num(d2),
        "E1": num(e1),
        "E2": num(e2),
        "R_grid": s.r_grid().iter().copied().map(num).collect::<Vec<_>>(),
    })
}

pub fn mode_json(mode: ModeIndex, family: Family) -> Value {
    json!({"mode_r": mode.r, "mode_s": mode.s, "family": family.name()})
}
