//! Prüfer-angle shooting.
//!
//! With `a = ρ sin θ`, `a' = ρ cos θ` the angle obeys
//! `θ' = cos²θ + (λ - q) sin²θ`, which is increasing in `λ`; eigenvalue `k`
//! is the `λ` at which the end angle hits its target plus `kπ`. The angle is
//! recovered from `(a, a')` propagated by a fourth-order Magnus method, which
//! stays stable where `q - λ` is large.

use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{BoundaryCondition, Method, Potential, SlProblem, SpectrumResult, Window};
use crate::{Error, Result};

/// Steps per unit of `∫√(λ-q)` are at least `n / STEP_SCALE`.
const STEP_SCALE: f64 = 8.0;
const SQRT3_OVER_12: f64 = 0.144_337_567_297_406_43;
/// `|h| √(q - λ)` beyond which a step has forgotten its initial direction.
const STIFF_EXPONENT: f64 = 20.0;
const GAUSS_LO: f64 = 0.211_324_865_405_187_1;
const GAUSS_HI: f64 = 0.788_675_134_594_812_9;
const START_N: usize = 32;
const MAX_N: usize = 1 << 16;
const PHASE_TOL: f64 = 1e-9;
const MAX_ITER: usize = 200;
const POTENTIAL_SAMPLES: usize = 4096;
const MATCH_SAMPLES: usize = 256;

#[derive(Debug, Clone, Copy)]
struct Phase {
    value: f64,
    error: f64,
}

fn start_angle(bc: BoundaryCondition) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => 0.0,
        BoundaryCondition::Robin { beta } => 1.0.atan2(beta),
    }
}

fn target_angle(bc: BoundaryCondition) -> f64 {
    match bc {
        BoundaryCondition::Dirichlet => PI,
        BoundaryCondition::Robin { beta } => 1.0.atan2(beta),
    }
}

/// One fourth-order Magnus step for `(a, a')' = [[0, 1], [q - λ, 0]] (a, a')`
/// over `[u, u + h]`, returned rescaled by a positive factor. `c1`, `c2` are
/// `q - λ` at the Gauss points and `c_end` at `u + h`.
///
/// Where `h² |q - λ| > 1` the Magnus series is outside its convergence range
/// and the commutator term would dominate, so the step uses the exact
/// propagator of the frozen mean coefficient. Past `STIFF_EXPONENT` that
/// propagator has collapsed onto its growing eigenvector, and the direction
/// is taken from `c_end` instead (the solution relaxes to the local
/// `a'/a = ±√(q - λ)` within the step).
fn magnus_step(y: [f64; 2], h: f64, c1: f64, c2: f64, c_end: f64) -> [f64; 2] {
    // Ω = [[d, h], [h (c1 + c2)/2, -d]], traceless, so Ω² = μ I
    let lower = 0.5 * h * (c1 + c2);
    let d = if (h * lower).abs() <= 1.0 {
        SQRT3_OVER_12 * h * h * (c1 - c2)
    } else {
        0.0
    };
    let mu = d * d + h * lower;
    let (c, s) = if mu > 1e-8 {
        let r = mu.sqrt();
        // cosh and sinh scaled by e^{-r}
        let e = (-2.0 * r).exp();
        (0.5 * (1.0 + e), 0.5 * (1.0 - e) / r)
    } else if mu < -1e-8 {
        let r = (-mu).sqrt();
        (r.cos(), r.sin() / r)
    } else {
        (1.0 + 0.5 * mu, 1.0 + mu / 6.0)
    };
    let a = c * y[0] + s * (d * y[0] + h * y[1]);
    let b = c * y[1] + s * (lower * y[0] - d * y[1]);
    if mu > STIFF_EXPONENT * STIFF_EXPONENT && c_end > 0.0 && a != 0.0 {
        let w = c_end.sqrt() * h.signum();
        let sign = a.signum();
        return if w.abs() <= 1.0 { [sign, sign * w] } else { [sign / w.abs(), sign * w.signum()] };
    }
    let norm = a.abs().max(b.abs());
    [a / norm, b / norm]
}

/// Angle of `(a, a')` with `a = ρ sin θ`, `a' = ρ cos θ`, reduced to `[0, π)`.
fn reduced_angle(y: [f64; 2]) -> f64 {
    let t = y[0].atan2(y[1]);
    if t < 0.0 {
        t + PI
    } else if t >= PI {
        t - PI
    } else {
        t
    }
}

/// Continuous Prüfer angle carried from `from` (angle `theta`) to `to`, in
/// either direction. Steps are `base`, shortened to `STEP_SCALE / (n √(λ - q))`
/// where the solution oscillates, so that a step crosses at most one zero of
/// `a`.
fn carry_phase<P: Potential>(problem: &SlProblem<P>, lambda: f64, n: usize, from: f64, to: f64, theta: f64) -> f64 {
    let span = (to - from).abs();
    if span == 0.0 {
        return theta;
    }
    let dir = if to > from { 1.0 } else { -1.0 };
    let base = problem.len() / n as f64;
    let (mut s0, c0) = theta.sin_cos();
    if s0.abs() < 1e-15 {
        // start exactly on a zero of a so the first step is counted correctly
        s0 = 0.0;
    }
    let mut y = [s0, c0];
    let mut turns = ((theta - reduced_angle(y)) / PI).round();
    let mut u = from;
    loop {
        let freq = (lambda - problem.q(u)).max(0.0).sqrt();
        let mut h = if freq > 0.0 {
            base.min(STEP_SCALE / (n as f64 * freq))
        } else {
            base
        };
        let last = (to - u) * dir <= h * (1.0 + 1e-12);
        if last {
            h = (to - u) * dir;
        }
        let hs = dir * h;
        let c1 = problem.q(u + GAUSS_LO * hs) - lambda;
        let c2 = problem.q(u + GAUSS_HI * hs) - lambda;
        let c_end = problem.q(u + hs) - lambda;
        let next = magnus_step(y, hs, c1, c2, c_end);
        // θ crosses multiples of π only in the direction of integration
        if dir > 0.0 {
            if (y[0] != 0.0 && next[0] == 0.0) || y[0] * next[0] < 0.0 {
                turns += 1.0;
            }
        } else if (y[0] == 0.0 && next[0] != 0.0) || y[0] * next[0] < 0.0 {
            turns -= 1.0;
        }
        y = next;
        if last {
            return turns * PI + reduced_angle(y);
        }
        u += hs;
    }
}

/// Where the two shooting legs meet: the sampled minimum of `q`, where
/// neither leg is dominated by exponential growth.
fn match_point<P: Potential>(problem: &SlProblem<P>) -> f64 {
    let (m0, _) = problem.interval();
    let mut best = (f64::INFINITY, m0);
    for i in 0..=MATCH_SAMPLES {
        let u = m0 + problem.len() * i as f64 / MATCH_SAMPLES as f64;
        let q = problem.q(u);
        if q < best.0 {
            best = (q, u);
        }
    }
    best.1
}

/// Left angle minus right angle at `c`; equals the end angle minus its
/// target when `c = m1`.
fn end_phase<P: Potential>(problem: &SlProblem<P>, lambda: f64, n: usize, c: f64) -> f64 {
    let (m0, m1) = problem.interval();
    let left = carry_phase(problem, lambda, n, m0, c, start_angle(problem.left()));
    let right = carry_phase(problem, lambda, n, m1, c, target_angle(problem.right()));
    left - right
}

/// End angle refined by step doubling until two levels agree.
fn converged_phase<P: Potential>(problem: &SlProblem<P>, lambda: f64) -> Result<Phase> {
    let c = match_point(problem);
    let mut n = START_N;
    let mut coarse = end_phase(problem, lambda, n, c);
    loop {
        n *= 2;
        let fine = end_phase(problem, lambda, n, c);
        let diff = fine - coarse;
        if !fine.is_finite() {
            return Err(Error::Integrator(alloc::format!("non-finite phase at lambda = {lambda}")));
        }
        if diff.abs() <= PHASE_TOL * fine.abs().max(1.0) {
            return Ok(Phase {
                value: fine + diff / 15.0,
                error: diff.abs() / 15.0 + 1e-13 * fine.abs().max(1.0),
            });
        }
        if n >= MAX_N {
            return Err(Error::Integrator(alloc::format!(
                "phase did not converge at lambda = {lambda} (last change {diff:e})"
            )));
        }
        coarse = fine;
    }
}

/// End angle minus target, in units where eigenvalue `k` is the zero of
/// `mismatch - kπ`.
fn mismatch<P: Potential>(problem: &SlProblem<P>, lambda: f64) -> Result<Phase> {
    converged_phase(problem, lambda)
}

fn count_from_mismatch(m: f64) -> usize {
    let c = (m / PI).ceil();
    if c > 0.0 {
        c as usize
    } else {
        0
    }
}

/// Number of eigenvalues strictly below `lambda`.
pub fn count_below<P: Potential>(problem: &SlProblem<P>, lambda: f64) -> Result<usize> {
    Ok(count_from_mismatch(mismatch(problem, lambda)?.value))
}

/// Point below the whole spectrum, verified by the phase count.
fn floor<P: Potential>(problem: &SlProblem<P>) -> Result<f64> {
    let lo = problem.spectral_lower_bound(POTENTIAL_SAMPLES)? - 1.0;
    let found = count_below(problem, lo)?;
    if found != 0 {
        return Err(Error::CountMismatch { expected: 0, found });
    }
    Ok(lo)
}

/// Point above eigenvalue `k`, by doubling from `lo`.
fn ceiling<P: Potential>(problem: &SlProblem<P>, lo: f64, k: usize) -> Result<f64> {
    let mut step = 1.0f64.max(0.1 * lo.abs());
    for _ in 0..200 {
        let hi = lo + step;
        if count_below(problem, hi)? > k {
            return Ok(hi);
        }
        step *= 2.0;
    }
    Err(Error::Integrator(alloc::format!("no upper bracket for eigenvalue {k}")))
}

/// Root of `mismatch - kπ` in `[a, b]`, which must bracket it.
fn find_root<P: Potential>(problem: &SlProblem<P>, k: usize, mut a: f64, mut b: f64) -> Result<(f64, f64)> {
    let shift = k as f64 * PI;
    let fa0 = mismatch(problem, a)?;
    let fb0 = mismatch(problem, b)?;
    let (mut fa, mut fb) = (fa0.value - shift, fb0.value - shift);
    if fa > 0.0 || fb <= 0.0 {
        return Err(Error::CountMismatch {
            expected: k,
            found: count_from_mismatch(if fa > 0.0 { fa0.value } else { fb0.value }),
        });
    }
    let mut phase_error = fa0.error.max(fb0.error);
    let mut side = 0i8;
    for _ in 0..MAX_ITER {
        let tol = 1e-13 * a.abs().max(b.abs()).max(1.0);
        if b - a <= tol {
            break;
        }
        let mut x = (a * fb - b * fa) / (fb - fa);
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = mismatch(problem, x)?;
        let v = fx.value - shift;
        phase_error = phase_error.max(fx.error);
        if v.abs() <= fx.error {
            // the sign is no longer resolved; shrink the bracket around x
            let half = (b - a) * 1e-3;
            let (lo, hi) = ((x - half).max(a), (x + half).min(b));
            let (flo, fhi) = (mismatch(problem, lo)?.value - shift, mismatch(problem, hi)?.value - shift);
            if flo <= 0.0 && fhi > 0.0 {
                a = lo;
                b = hi;
                fa = flo;
                fb = fhi;
            }
            let slope = (fb - fa) / (b - a);
            return finish(k, a, b, fa, fb, x, phase_error, slope);
        }
        if v <= 0.0 {
            a = x;
            fa = v;
            if side == -1 {
                fb *= 0.5;
            }
            side = -1;
        } else {
            b = x;
            fb = v;
            if side == 1 {
                fa *= 0.5;
            }
            side = 1;
        }
    }
    let fa = mismatch(problem, a)?.value - shift;
    let fb = mismatch(problem, b)?.value - shift;
    let slope = (fb - fa) / (b - a);
    let x = if fb > fa { a - fa / slope } else { 0.5 * (a + b) };
    finish(k, a, b, fa, fb, x.clamp(a, b), phase_error, slope)
}

#[allow(clippy::too_many_arguments)]
fn finish(k: usize, a: f64, b: f64, fa: f64, fb: f64, x: f64, phase_error: f64, slope: f64) -> Result<(f64, f64)> {
    if !(fa > -PI && fa <= 0.0 && fb > 0.0 && fb < PI) {
        let found = count_from_mismatch(fa + k as f64 * PI);
        return Err(Error::CountMismatch { expected: k, found });
    }
    let err = (b - a) + if slope > 0.0 { phase_error / slope } else { b - a };
    Ok((x, err))
}

/// Eigenvalue `k` (0-based) and its error estimate.
pub fn eigenvalue_by_index<P: Potential>(problem: &SlProblem<P>, k: usize) -> Result<(f64, f64)> {
    let lo = floor(problem)?;
    let hi = ceiling(problem, lo, k)?;
    find_root(problem, k, lo, hi)
}

/// Lowest eigenvalue and its error estimate, bracketed from the form bound.
pub fn lowest_eigenvalue<P: Potential>(problem: &SlProblem<P>) -> Result<(f64, f64)> {
    eigenvalue_by_index(problem, 0)
}

/// All eigenvalues in the window.
pub fn solve_shooting<P: Potential>(problem: &SlProblem<P>, window: Window) -> Result<SpectrumResult> {
    problem.potential_range(POTENTIAL_SAMPLES)?;
    let first = count_below(problem, window.lo)?;
    let last = count_below(problem, window.hi)?;
    let mut eigenvalues = Vec::with_capacity(last.saturating_sub(first));
    let mut error_estimates = Vec::with_capacity(eigenvalues.capacity());
    let mut a = window.lo;
    for k in first..last {
        let (value, err) = find_root(problem, k, a, window.hi)?;
        if let Some(prev) = eigenvalues.last() {
            if value <= *prev {
                return Err(Error::CountMismatch {
                    expected: k,
                    found: k - 1,
                });
            }
        }
        eigenvalues.push(value);
        error_estimates.push(err);
        a = value;
    }
    Ok(SpectrumResult {
        eigenvalues,
        error_estimates,
        first_index: first,
        method: Method::Shooting,
        grid_n: 0,
    })
}
