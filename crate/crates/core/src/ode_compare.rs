//! Comparison of `-a'' + q a = 0` with `-v'' + k² v = 0` when `q > k²`.
//!
//! Checks, on computed trajectories, that
//! * from Robin data `a(m0) = 1, a'(m0) = -α` with `α ≤ k` the logarithmic
//!   derivatives satisfy `a'/a ≥ v'/v`, and `a'/a ≥ k/2` far out;
//! * from Dirichlet data `a(m0) = 0` the solution grows at least like
//!   `a(δ) e^{k(u-δ)/2}` beyond `δ > m0` and never returns to zero.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::rk4;
use crate::sturm_liouville::Potential;
use crate::{Error, Result};

/// Relative agreement required between a run and its step-halved rerun.
pub const HALVING_TOL: f64 = 1e-10;

/// Tolerance on the Riccati margin `a'/a - v'/v`.
pub const RICCATI_TOL: f64 = 1e-8;

/// Tolerance on the slope bound `a'/a ≥ k/2`.
pub const SLOPE_TOL: f64 = 1e-6;

/// Relative tolerance on the growth bound.
pub const GROWTH_TOL: f64 = 1e-8;

/// Points with `|a|` or `|v|` below this fraction of their maximum are
/// skipped in the Riccati check.
pub const DENOMINATOR_GUARD: f64 = 1e-10;

const START_STEPS: usize = 1024;
const MAX_STEPS: usize = 1 << 22;
const POTENTIAL_SAMPLES: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Start {
    /// `a(m0) = 1, a'(m0) = -alpha`
    Robin { alpha: f64 },
    /// `a(m0) = 0, a'(m0) = slope`
    Dirichlet { slope: f64 },
}

impl Start {
    fn initial(&self) -> (f64, f64) {
        match *self {
            Start::Robin { alpha } => (1.0, -alpha),
            Start::Dirichlet { slope } => (0.0, slope),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonCase<P> {
    q: P,
    k: f64,
    m0: f64,
    m1: f64,
}

impl<P: Potential> ComparisonCase<P> {
    /// Requires sampled `inf q > k²`.
    pub fn new(q: P, k: f64, m0: f64, m1: f64) -> Result<Self> {
        let case = Self::relaxed(q, k, m0, m1)?;
        let inf = case.potential_infimum()?;
        if !(inf > k * k) {
            return Err(Error::InvalidProblem(format!("inf q = {inf} must exceed k^2 = {}", k * k)));
        }
        Ok(case)
    }

    /// Allows `q ≥ k²`, including the equality case.
    pub fn relaxed(q: P, k: f64, m0: f64, m1: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidProblem(format!("k = {k} must be > 0")));
        }
        if !(m0.is_finite() && m1.is_finite() && m0 < m1) {
            return Err(Error::InvalidProblem(format!("interval [{m0}, {m1}] is empty")));
        }
        let case = Self { q, k, m0, m1 };
        let inf = case.potential_infimum()?;
        if inf < k * k {
            return Err(Error::InvalidProblem(format!("inf q = {inf} is below k^2 = {}", k * k)));
        }
        Ok(case)
    }

    fn potential_infimum(&self) -> Result<f64> {
        let mut inf = f64::INFINITY;
        for i in 0..=POTENTIAL_SAMPLES {
            let u = self.m0 + (self.m1 - self.m0) * i as f64 / POTENTIAL_SAMPLES as f64;
            let q = self.q.eval(u);
            if !q.is_finite() {
                return Err(Error::InvalidProblem(format!("q({u}) = {q} is not finite")));
            }
            inf = inf.min(q);
        }
        Ok(inf)
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.m0, self.m1)
    }

    /// Closed-form comparison solution `(v, v')` at `u`.
    pub fn v_exact(&self, start: Start, u: f64) -> (f64, f64) {
        let (a0, a1) = start.initial();
        let k = self.k;
        let x = u - self.m0;
        let (c, s) = ((k * x).cosh(), (k * x).sinh());
        (a0 * c + a1 / k * s, a0 * k * s + a1 * c)
    }
}

/// Solutions sampled on a grid of `[m0, m1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectories {
    pub u: Vec<f64>,
    pub a: Vec<f64>,
    pub a_prime: Vec<f64>,
    /// Integrated comparison solution.
    pub v: Vec<f64>,
    pub v_prime: Vec<f64>,
    pub v_exact: Vec<f64>,
    pub v_exact_prime: Vec<f64>,
    /// RK4 steps over the whole interval in the accepted run.
    pub steps: usize,
    /// Relative difference to the run with twice the step.
    pub halving_discrepancy: f64,
    /// `max |v - v_exact| / max |v_exact|`
    pub v_discrepancy: f64,
}

fn run<P: Potential>(case: &ComparisonCase<P>, y0: [f64; 4], nodes: &[f64], steps: usize) -> Vec<[f64; 4]> {
    let h_max = (case.m1 - case.m0) / steps as f64;
    let k2 = case.k * case.k;
    let rhs = |u: f64, y: &[f64; 4]| [y[1], case.q.eval(u) * y[0], y[3], k2 * y[2]];
    let mut out = Vec::with_capacity(nodes.len());
    let mut y = y0;
    let mut u = nodes[0];
    out.push(y);
    for &next in &nodes[1..] {
        let sub = (((next - u) / h_max).ceil() as usize).max(1);
        let h = (next - u) / sub as f64;
        for i in 0..sub {
            y = rk4::step(&rhs, u + i as f64 * h, y, h);
        }
        u = next;
        out.push(y);
    }
    out
}

/// Integrates on `nodes` (increasing, starting at `m0`), halving the step
/// until two runs agree to [`HALVING_TOL`].
fn integrate_on<P: Potential>(
    case: &ComparisonCase<P>,
    start: Start,
    nodes: &[f64],
) -> Result<(Vec<[f64; 4]>, usize, f64)> {
    let (a0, a1) = start.initial();
    let y0 = [a0, a1, a0, a1];
    let mut steps = START_STEPS;
    let mut coarse = run(case, y0, nodes, steps);
    loop {
        steps *= 2;
        let fine = run(case, y0, nodes, steps);
        let mut discrepancy: f64 = 0.0;
        for c in 0..4 {
            let scale = fine.iter().fold(0.0f64, |m, y| m.max(y[c].abs())).max(f64::MIN_POSITIVE);
            for (f, g) in fine.iter().zip(&coarse) {
                discrepancy = discrepancy.max((f[c] - g[c]).abs() / scale);
            }
        }
        if !discrepancy.is_finite() {
            return Err(Error::Integrator("non-finite trajectory".into()));
        }
        if discrepancy <= HALVING_TOL {
            return Ok((fine, steps, discrepancy));
        }
        if steps >= MAX_STEPS {
            return Err(Error::Integrator(format!(
                "step halving did not settle (discrepancy {discrepancy:e} at {steps} steps)"
            )));
        }
        coarse = fine;
    }
}

fn default_nodes(m0: f64, m1: f64, extra: Option<f64>) -> Vec<f64> {
    const NODES: usize = 1000;
    let mut nodes: Vec<f64> = (0..=NODES)
        .map(|i| if i == NODES { m1 } else { m0 + (m1 - m0) * i as f64 / NODES as f64 })
        .collect();
    if let Some(x) = extra {
        if let Err(pos) = nodes.binary_search_by(|p| p.total_cmp(&x)) {
            nodes.insert(pos, x);
        }
    }
    nodes
}

fn trajectories<P: Potential>(case: &ComparisonCase<P>, start: Start, nodes: Vec<f64>) -> Result<Trajectories> {
    let (ys, steps, halving_discrepancy) = integrate_on(case, start, &nodes)?;
    let exact: Vec<(f64, f64)> = nodes.iter().map(|&u| case.v_exact(start, u)).collect();
    let v_scale = exact.iter().fold(0.0f64, |m, e| m.max(e.0.abs())).max(f64::MIN_POSITIVE);
    let v_discrepancy = ys
        .iter()
        .zip(&exact)
        .map(|(y, e)| (y[2] - e.0).abs() / v_scale)
        .fold(0.0, f64::max);
    Ok(Trajectories {
        a: ys.iter().map(|y| y[0]).collect(),
        a_prime: ys.iter().map(|y| y[1]).collect(),
        v: ys.iter().map(|y| y[2]).collect(),
        v_prime: ys.iter().map(|y| y[3]).collect(),
        v_exact: exact.iter().map(|e| e.0).collect(),
        v_exact_prime: exact.iter().map(|e| e.1).collect(),
        u: nodes,
        steps,
        halving_discrepancy,
        v_discrepancy,
    })
}

/// `a` and `v` from the same initial data on a 1001-point grid.
pub fn integrate_pair<P: Potential>(case: &ComparisonCase<P>, start: Start) -> Result<Trajectories> {
    trajectories(case, start, default_nodes(case.m0, case.m1, None))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiccatiReport {
    /// `min (a'/a - v'/v)` over checked points.
    pub min_margin: f64,
    pub checked: usize,
    pub skipped: usize,
}

impl RiccatiReport {
    pub fn passed(&self) -> bool {
        self.checked > 0 && self.min_margin >= -RICCATI_TOL
    }
}

fn check_alpha(k: f64, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha <= k) {
        return Err(Error::InvalidProblem(format!("alpha = {alpha} must be <= k = {k}")));
    }
    Ok(())
}

/// `a'/a ≥ v'/v` on the grid, with `v` in closed form.
pub fn verify_riccati<P: Potential>(case: &ComparisonCase<P>, alpha: f64) -> Result<RiccatiReport> {
    check_alpha(case.k, alpha)?;
    let t = integrate_pair(case, Start::Robin { alpha })?;
    Ok(riccati_from(&t))
}

fn riccati_from(t: &Trajectories) -> RiccatiReport {
    let a_max = t.a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let v_max = t.v_exact.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mut report = RiccatiReport {
        min_margin: f64::INFINITY,
        checked: 0,
        skipped: 0,
    };
    for i in 0..t.u.len() {
        let (a, v) = (t.a[i], t.v_exact[i]);
        if a.abs() < DENOMINATOR_GUARD * a_max || v.abs() < DENOMINATOR_GUARD * v_max {
            report.skipped += 1;
            continue;
        }
        report.checked += 1;
        let margin = t.a_prime[i] / a - t.v_exact_prime[i] / v;
        report.min_margin = report.min_margin.min(margin);
    }
    report
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeReport {
    /// `a'(m1) / a(m1)`; NaN if `a(m1)` vanished.
    pub slope: f64,
    /// `v'(m1) / v(m1)` from the closed form.
    pub v_slope: f64,
    /// Limit of the comparison slope, `k`.
    pub v_slope_limit: f64,
    /// `k / 2`
    pub threshold: f64,
}

impl SlopeReport {
    pub fn passed(&self) -> bool {
        self.slope >= self.threshold - SLOPE_TOL
    }
}

/// `a'(m1)/a(m1)` from Robin data; needs `m1 ≥ m0 + 10/k`.
pub fn asymptotic_slope<P: Potential>(case: &ComparisonCase<P>, alpha: f64) -> Result<SlopeReport> {
    check_alpha(case.k, alpha)?;
    if case.m1 < case.m0 + 10.0 / case.k {
        return Err(Error::InvalidProblem(format!(
            "m1 = {} must be at least m0 + 10/k = {}",
            case.m1,
            case.m0 + 10.0 / case.k
        )));
    }
    let t = integrate_pair(case, Start::Robin { alpha })?;
    Ok(slope_from(case, &t))
}

fn slope_from<P>(case: &ComparisonCase<P>, t: &Trajectories) -> SlopeReport {
    let last = t.u.len() - 1;
    let a_max = t.a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let a = t.a[last];
    let slope = if a.abs() <= DENOMINATOR_GUARD * a_max {
        f64::NAN
    } else {
        t.a_prime[last] / a
    };
    SlopeReport {
        slope,
        v_slope: t.v_exact_prime[last] / t.v_exact[last],
        v_slope_limit: case.k,
        threshold: 0.5 * case.k,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthReport {
    pub delta: f64,
    pub a_delta: f64,
    /// `min sign·(a(u) - a(δ) e^{k(u-δ)/2}) / |a(u)|` over `u ∈ [δ, m1]`.
    pub min_margin: f64,
    pub a_m1: f64,
    /// `sign·a > 0` on every grid point of `(m0, m1]`.
    pub no_return: bool,
}

impl GrowthReport {
    pub fn passed(&self) -> bool {
        self.no_return && self.min_margin >= -GROWTH_TOL && self.a_m1 != 0.0
    }
}

/// Growth bound from Dirichlet data with `a'(m0) = slope ≠ 0`; `δ`
/// defaults to `m0 + 1/k`.
pub fn dirichlet_growth<P: Potential>(
    case: &ComparisonCase<P>,
    slope: f64,
    delta: Option<f64>,
) -> Result<GrowthReport> {
    if !(slope.is_finite() && slope != 0.0) {
        return Err(Error::InvalidProblem(format!("initial slope {slope} must be nonzero")));
    }
    let delta = delta.unwrap_or(case.m0 + 1.0 / case.k);
    if !(delta > case.m0 && delta < case.m1) {
        return Err(Error::InvalidProblem(format!(
            "delta = {delta} must lie in ({}, {})",
            case.m0, case.m1
        )));
    }
    let t = trajectories(case, Start::Dirichlet { slope }, default_nodes(case.m0, case.m1, Some(delta)))?;
    let sign = slope.signum();
    let i_delta = t.u.iter().position(|&u| u == delta).expect("delta is a node");
    let a_delta = t.a[i_delta];
    let mut min_margin = f64::INFINITY;
    for i in i_delta..t.u.len() {
        let bound = a_delta * (0.5 * case.k * (t.u[i] - delta)).exp();
        min_margin = min_margin.min(sign * (t.a[i] - bound) / t.a[i].abs());
    }
    let no_return = t.a[1..].iter().all(|&a| sign * a > 0.0);
    Ok(GrowthReport {
        delta,
        a_delta,
        min_margin,
        a_m1: *t.a.last().expect("nonempty grid"),
        no_return,
    })
}

/// `base + Σ amp (1 + sin(ω u + φ))`, bounded below by `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothPotential {
    pub base: f64,
    /// `(amp, omega, phase)`
    pub terms: Vec<(f64, f64, f64)>,
}

impl Potential for SmoothPotential {
    fn eval(&self, u: f64) -> f64 {
        self.base
            + self
                .terms
                .iter()
                .map(|(amp, omega, phase)| amp * (1.0 + (omega * u + phase).sin()))
                .sum::<f64>()
    }
}

/// A randomly drawn comparison case on `[0, 10/k]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomCase {
    pub k: f64,
    pub alpha: f64,
    /// Initial slope for the Dirichlet start (`±1`).
    pub slope: f64,
    pub potential: SmoothPotential,
    pub m1: f64,
}

impl RandomCase {
    pub fn case(&self) -> Result<ComparisonCase<SmoothPotential>> {
        ComparisonCase::new(self.potential.clone(), self.k, 0.0, self.m1)
    }
}

/// `k ∈ [0.5, 3]`, `q = k² + c0 + Σ_{j≤3} a_j (1 + sin(ω_j u + φ_j))` with
/// `c0 ∈ [0.05, 1]`, `a_j ∈ [0, 0.5]`, `ω_j ∈ [0.5, 3]`; `α ∈ [-2k, k]`.
pub fn random_suite(seed: u64, count: usize) -> Vec<RandomCase> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let k = rng.gen_range(0.5..=3.0);
            let c0 = rng.gen_range(0.05..=1.0);
            let terms = (0..3)
                .map(|_| {
                    (
                        rng.gen_range(0.0..=0.5),
                        rng.gen_range(0.5..=3.0),
                        rng.gen_range(0.0..2.0 * PI),
                    )
                })
                .collect();
            let alpha = rng.gen_range(-2.0 * k..=k);
            let slope = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            RandomCase {
                k,
                alpha,
                slope,
                potential: SmoothPotential { base: k * k + c0, terms },
                m1: 10.0 / k,
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteCaseReport {
    pub case: RandomCase,
    pub riccati: RiccatiReport,
    pub slope: SlopeReport,
    pub growth: GrowthReport,
}

impl SuiteCaseReport {
    pub fn passed(&self) -> bool {
        self.riccati.passed() && self.slope.passed() && self.growth.passed()
    }
}

/// Riccati, slope and growth checks on each case of [`random_suite`].
pub fn run_suite(seed: u64, count: usize) -> Result<Vec<SuiteCaseReport>> {
    random_suite(seed, count)
        .into_iter()
        .map(|rc| {
            let case = rc.case()?;
            let robin = integrate_pair(&case, Start::Robin { alpha: rc.alpha })?;
            let riccati = riccati_from(&robin);
            let slope = slope_from(&case, &robin);
            let growth = dirichlet_growth(&case, rc.slope, None)?;
            Ok(SuiteCaseReport {
                case: rc,
                riccati,
                slope,
                growth,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_potentials_give_equal_solutions() {
        let case = ComparisonCase::relaxed(|_u: f64| 4.0, 2.0, 0.0, 5.0).unwrap();
        assert!(ComparisonCase::new(|_u: f64| 4.0, 2.0, 0.0, 5.0).is_err());
        let t = integrate_pair(&case, Start::Robin { alpha: 0.5 }).unwrap();
        let scale = t.a.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        for (a, v) in t.a.iter().zip(&t.v_exact) {
            assert!((a - v).abs() <= 1e-9 * scale);
        }
        assert!(t.v_discrepancy < 1e-9);
        let r = verify_riccati(&case, 0.5).unwrap();
        assert!(r.min_margin.abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn robin_domination() {
        let case = ComparisonCase::new(|_u: f64| 5.0, 2.0, 0.0, 10.0).unwrap();
        let t = integrate_pair(&case, Start::Robin { alpha: 0.0 }).unwrap();
        assert!(t.a.iter().zip(&t.v_exact).all(|(a, v)| a >= v));
        let edge = ComparisonCase::new(|_u: f64| 2.0, 1.0, 0.0, 10.0).unwrap();
        assert!(verify_riccati(&edge, 1.0).unwrap().passed());
        assert!(verify_riccati(&edge, 1.5).is_err());
    }

    #[test]
    fn slopes() {
        let case = ComparisonCase::new(|_u: f64| 5.0, 2.0, 0.0, 20.0).unwrap();
        let s = asymptotic_slope(&case, 0.0).unwrap();
        assert!(s.passed() && s.slope >= 1.0);
        assert!((s.v_slope - 2.0).abs() < 1e-12);
        let edge = ComparisonCase::new(|_u: f64| 5.0, 2.0, 0.0, 5.0).unwrap();
        assert!(asymptotic_slope(&edge, 2.0).unwrap().passed());
        let short = ComparisonCase::new(|_u: f64| 5.0, 2.0, 0.0, 4.0).unwrap();
        assert!(asymptotic_slope(&short, 0.0).is_err());
    }

    #[test]
    fn dirichlet_sign_symmetry() {
        let case = ComparisonCase::new(|_u: f64| 4.5, 2.0, 0.0, 8.0).unwrap();
        let up = dirichlet_growth(&case, 1.0, None).unwrap();
        let down = dirichlet_growth(&case, -1.0, None).unwrap();
        assert!(up.passed() && down.passed(), "{up:?} {down:?}");
        assert_eq!(up.a_m1, -down.a_m1);
        // δ over (m0, m0 + 2/k]
        for i in 1..=8 {
            let delta = i as f64 / 8.0;
            assert!(dirichlet_growth(&case, 1.0, Some(delta)).unwrap().passed());
        }
    }

    #[test]
    fn suite_is_deterministic() {
        assert_eq!(random_suite(7, 3), random_suite(7, 3));
        assert_ne!(random_suite(7, 3), random_suite(8, 3));
    }
}
