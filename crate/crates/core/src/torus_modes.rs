//! Spectrum of the scalar Laplacian on the twisted flat tori `F_u`.
//!
//! The fibre over `u` is `R²` with metric `f(u)² dt² + h(u)² dθ²` modulo
//! `(t, θ) ~ (t + ε, θ + ρ) ~ (t, θ + 2π)`. Its eigenfunctions are indexed
//! by `(r, s) ∈ ℤ²`:
//!
//! ```text
//! g_(r,s) = exp(i[(2πs + rρ) t/ε - rθ]) / sqrt(2π ε f h)
//! κ_(r,s) = (2πs + rρ)² / (f² ε²) + r² / h²
//! ```

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::TubeGeometry;
use crate::{Error, Result};

/// Spacing of the `u`-grids used for infima over an interval.
pub const U_GRID_SPACING: f64 = 1e-3;

/// Largest lattice half-width tried before a certificate is declared failed.
pub const MAX_LATTICE: u32 = 1 << 16;

/// Lattice index `(r, s)`; ordering is lexicographic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeIndex {
    pub r: i64,
    pub s: i64,
}

impl ModeIndex {
    pub const ZERO: ModeIndex = ModeIndex { r: 0, s: 0 };

    pub fn new(r: i64, s: i64) -> Self {
        Self { r, s }
    }

    pub fn is_zero(&self) -> bool {
        self.r == 0 && self.s == 0
    }

    pub fn negated(&self) -> Self {
        Self {
            r: -self.r,
            s: -self.s,
        }
    }

    /// `2πs + rρ`
    fn twisted_frequency(&self, rho: f64) -> f64 {
        2.0 * PI * self.s as f64 + self.r as f64 * rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberEigenvalue {
    pub mode: ModeIndex,
    pub u: f64,
    pub kappa: f64,
}

/// `κ` from raw metric values. The `r²/h²` term is dropped for `r = 0`, so
/// `h = 0` is allowed there.
pub fn kappa_from_metric(mode: ModeIndex, f: f64, h: f64, epsilon: f64, rho: f64) -> f64 {
    let w = mode.twisted_frequency(rho) / (f * epsilon);
    let radial = if mode.r == 0 {
        0.0
    } else {
        let r = mode.r as f64;
        r * r / (h * h)
    };
    w * w + radial
}

pub(crate) fn kappa_unchecked(mode: ModeIndex, u: f64, geometry: &TubeGeometry) -> f64 {
    let x = geometry.radius() - u;
    kappa_from_metric(mode, x.cosh(), x.sinh(), geometry.epsilon(), geometry.rho())
}

/// Fibre eigenvalue `κ_mode(u)`. Requires `u < R`, where `h(u) > 0`.
pub fn kappa(mode: ModeIndex, u: f64, geometry: &TubeGeometry) -> Result<FiberEigenvalue> {
    if !(u.is_finite() && u < geometry.radius()) {
        return Err(Error::Domain {
            what: "u",
            value: u,
            domain: format!("(-inf, R = {})", geometry.radius()),
        });
    }
    Ok(FiberEigenvalue {
        mode,
        u,
        kappa: kappa_unchecked(mode, u, geometry),
    })
}

/// All `(r, s)` with `|r|, |s| ≤ m_max`, lexicographically ordered.
pub fn enumerate_modes(m_max: u32) -> Vec<ModeIndex> {
    let m = m_max as i64;
    let mut modes = Vec::with_capacity(((2 * m + 1) * (2 * m + 1)) as usize);
    for r in -m..=m {
        for s in -m..=m {
            modes.push(ModeIndex { r, s });
        }
    }
    modes
}

/// `n + 1` equispaced points on `[a, b]` with spacing at most `max_spacing`.
pub fn uniform_grid(a: f64, b: f64, max_spacing: f64) -> Vec<f64> {
    let n = (((b - a) / max_spacing).ceil() as usize).max(1);
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}

/// Lower bound for `κ_(r,s)(u)` over every mode outside the box
/// `|r|, |s| ≤ m_max`.
///
/// Uses that `A(2πs + rρ)² + B r²` (`A = 1/(fε)²`, `B = 1/h²`) is convex in
/// `r`: rows `|s| ≤ m_max` are minimised exactly over the integers
/// `|r| > m_max`, and rows `|s| > m_max` are bounded by the real minimum
/// `(2πs)² AB / (Aρ² + B)`, which grows with `|s|`.
pub fn kappa_tail_bound(geometry: &TubeGeometry, m_max: u32, u: f64) -> f64 {
    let x = geometry.radius() - u;
    let (f, h) = (x.cosh(), x.sinh());
    let rho = geometry.rho();
    let a = 1.0 / (f * geometry.epsilon()).powi(2);
    let b = 1.0 / (h * h);
    let edge = m_max as f64 + 1.0;
    let row = |s: f64, r: f64| a * (2.0 * PI * s + r * rho).powi(2) + b * r * r;

    // s = 0 row: κ = r² (Aρ² + B)
    let mut best = edge * edge * (a * rho * rho + b);
    // |s| > m_max
    let two_pi_s = 2.0 * PI * edge;
    best = best.min(two_pi_s * two_pi_s * a * b / (a * rho * rho + b));
    // 1 ≤ s ≤ m_max, |r| > m_max; (−r, −s) gives the same values
    for s in 1..=m_max {
        let s = s as f64;
        let r_star = -a * 2.0 * PI * s * rho / (a * rho * rho + b);
        for side in [1.0, -1.0] {
            // integers r with side * r >= edge
            let t_star = side * r_star;
            let candidates = [t_star.floor(), t_star.ceil(), edge];
            for t in candidates {
                if t >= edge {
                    best = best.min(row(s, side * t));
                }
            }
        }
    }
    best
}

/// Minimum of `κ` over `u` and off-zero modes, with its truncation certificate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaMinimum {
    pub value: f64,
    pub mode: ModeIndex,
    pub u: f64,
    pub m_max: u32,
    /// Infimum over `u` of [`kappa_tail_bound`]; never below `value`.
    pub tail_bound: f64,
}

/// Minimum of `κ_i(u)` over the `1e-3` grid of `[r0, R0]` and the lattice
/// `|r|, |s| ≤ m_max` without the zero mode.
///
/// Fails if a mode outside the lattice could undercut the reported minimum.
pub fn min_offzero_kappa(geometry: &TubeGeometry, m_max: u32) -> Result<KappaMinimum> {
    let (r0, r_outer) = geometry.interval()?;
    if m_max == 0 {
        return Err(Error::InvalidInput("m_max must be at least 1".into()));
    }
    let modes: Vec<ModeIndex> = enumerate_modes(m_max)
        .into_iter()
        .filter(|m| !m.is_zero())
        .collect();
    let mut best = KappaMinimum {
        value: f64::INFINITY,
        mode: ModeIndex::ZERO,
        u: r0,
        m_max,
        tail_bound: f64::INFINITY,
    };
    for u in uniform_grid(r0, r_outer, U_GRID_SPACING) {
        for &mode in &modes {
            let k = kappa_unchecked(mode, u, geometry);
            if k < best.value {
                best.value = k;
                best.mode = mode;
                best.u = u;
            }
        }
        best.tail_bound = best.tail_bound.min(kappa_tail_bound(geometry, m_max, u));
    }
    if best.tail_bound < best.value {
        return Err(Error::Truncation {
            m_max,
            tail_bound: best.tail_bound,
            target: best.value,
        });
    }
    Ok(best)
}

/// Lattice size that provably contains every mode with `inf_u κ ≤ target`
/// on `[r0, R0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationCertificate {
    pub m_max: u32,
    /// `inf_u` of the tail bound outside the lattice; strictly above the target.
    pub boundary_kappa_min: f64,
}

/// Grows `m_max` (doubling from 1) until every mode outside the lattice
/// has `κ > target` on the whole grid.
pub fn certify_window(geometry: &TubeGeometry, target: f64) -> Result<TruncationCertificate> {
    let (r0, r_outer) = geometry.interval()?;
    let grid = uniform_grid(r0, r_outer, U_GRID_SPACING);
    let mut m_max = 1u32;
    loop {
        let tail = grid
            .iter()
            .map(|&u| kappa_tail_bound(geometry, m_max, u))
            .fold(f64::INFINITY, f64::min);
        if tail > target {
            return Ok(TruncationCertificate {
                m_max,
                boundary_kappa_min: tail,
            });
        }
        if m_max >= MAX_LATTICE {
            return Err(Error::Truncation {
                m_max,
                tail_bound: tail,
                target,
            });
        }
        m_max *= 2;
    }
}

/// `inf_u κ_mode(u)` over the `1e-3` grid of `[r0, R0]`.
pub fn kappa_infimum(mode: ModeIndex, geometry: &TubeGeometry) -> Result<f64> {
    let (r0, r_outer) = geometry.interval()?;
    Ok(uniform_grid(r0, r_outer, U_GRID_SPACING)
        .into_iter()
        .map(|u| kappa_unchecked(mode, u, geometry))
        .fold(f64::INFINITY, f64::min))
}

/// `‖a_i‖² = 2π ε f(u) h(u)`, the squared `L²(F_u)` norm of the
/// unnormalised exponential.
pub fn fiber_norm_squared(geometry: &TubeGeometry, u: f64) -> f64 {
    let p = geometry.profile();
    2.0 * PI * geometry.epsilon() * p.f(u) * p.h(u)
}

/// `g_mode(u, t, θ)` as `(re, im)`.
pub fn fiber_eigenfunction(
    mode: ModeIndex,
    geometry: &TubeGeometry,
    u: f64,
    t: f64,
    theta: f64,
) -> (f64, f64) {
    let phase = mode.twisted_frequency(geometry.rho()) * t / geometry.epsilon()
        - mode.r as f64 * theta;
    let scale = 1.0 / fiber_norm_squared(geometry, u).sqrt();
    (scale * phase.cos(), scale * phase.sin())
}

/// Largest relative residuals of the derivative identities of `g_i`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ModeIdentityReport {
    /// `∂_u g = -½ (log fh)' g`
    pub du: f64,
    /// `∂_u² g = [-½ (log fh)'' + ¼ ((log fh)')²] g`
    pub du2: f64,
    /// `∂_t g = i (2πs + rρ)/ε g`
    pub dt: f64,
    /// `∂_θ g = -i r g`
    pub dtheta: f64,
    /// `Δ₀ g = κ g` for `Δ₀ = -f⁻² ∂_t² - h⁻² ∂_θ²`
    pub laplacian: f64,
    pub samples: usize,
}

impl ModeIdentityReport {
    pub fn max_residual(&self) -> f64 {
        [self.du, self.du2, self.dt, self.dtheta, self.laplacian]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

type Complex = (f64, f64);

fn c_sub(a: Complex, b: Complex) -> Complex {
    (a.0 - b.0, a.1 - b.1)
}

fn c_scale(a: Complex, k: f64) -> Complex {
    (a.0 * k, a.1 * k)
}

fn c_abs(a: Complex) -> f64 {
    a.0.hypot(a.1)
}

/// Richardson-extrapolated central first and second differences.
fn differentiate<F: Fn(f64) -> Complex>(g: F, x: f64, h: f64) -> (Complex, Complex) {
    let d1 = |h: f64| c_scale(c_sub(g(x + h), g(x - h)), 0.5 / h);
    let d2 = |h: f64| {
        let c = g(x);
        let s = c_sub(c_sub(g(x + h), c), c_sub(c, g(x - h)));
        c_scale(s, 1.0 / (h * h))
    };
    let rich = |coarse: Complex, fine: Complex| {
        (
            (4.0 * fine.0 - coarse.0) / 3.0,
            (4.0 * fine.1 - coarse.1) / 3.0,
        )
    };
    (rich(d1(h), d1(0.5 * h)), rich(d2(h), d2(0.5 * h)))
}

/// Checks the derivative and eigen identities of `g_mode` by numerical
/// differentiation of the closed form at every `u` sample (and a fixed
/// interior `(t, θ)`). Residuals are relative to `|g|·max(1, |coefficient|)`.
pub fn verify_mode_identities(
    mode: ModeIndex,
    geometry: &TubeGeometry,
    u_samples: &[f64],
) -> Result<ModeIdentityReport> {
    let (r0, r_outer) = geometry.interval()?;
    if let Some(&bad) = u_samples.iter().find(|&&u| !(u > r0 && u < r_outer)) {
        return Err(Error::Domain {
            what: "u sample",
            value: bad,
            domain: format!("({r0}, {r_outer})"),
        });
    }
    let profile = geometry.profile();
    let omega = mode.twisted_frequency(geometry.rho()) / geometry.epsilon();
    let r = mode.r as f64;
    let t0 = 0.37 * geometry.epsilon();
    let theta0 = 1.1;
    let h_u = 1e-3;
    let h_t = 1e-2 / omega.abs().max(1.0);
    let h_theta = 1e-2 / r.abs().max(1.0);

    let mut report = ModeIdentityReport {
        samples: u_samples.len(),
        ..Default::default()
    };
    let residual = |num: Complex, exact: Complex, g: Complex, coeff: f64| {
        c_abs(c_sub(num, exact)) / (c_abs(g) * coeff.abs().max(1.0))
    };
    for &u in u_samples {
        let g = fiber_eigenfunction(mode, geometry, u, t0, theta0);
        let lp = profile.log_fh_derivative(u);
        let lpp = profile.log_fh_second_derivative(u);

        let (du, du2) = differentiate(|x| fiber_eigenfunction(mode, geometry, x, t0, theta0), u, h_u);
        let c1 = -0.5 * lp;
        report.du = report.du.max(residual(du, c_scale(g, c1), g, c1));
        let c2 = -0.5 * lpp + 0.25 * lp * lp;
        report.du2 = report.du2.max(residual(du2, c_scale(g, c2), g, c2));

        let (dt, dt2) = differentiate(|x| fiber_eigenfunction(mode, geometry, u, x, theta0), t0, h_t);
        // i ω g = (-ω g_im, ω g_re)
        report.dt = report.dt.max(residual(dt, (-omega * g.1, omega * g.0), g, omega));

        let (dth, dth2) =
            differentiate(|x| fiber_eigenfunction(mode, geometry, u, t0, x), theta0, h_theta);
        report.dtheta = report.dtheta.max(residual(dth, (r * g.1, -r * g.0), g, r));

        let (f, h) = (profile.f(u), profile.h(u));
        let lap = c_sub(c_scale(dt2, -1.0 / (f * f)), c_scale(dth2, 1.0 / (h * h)));
        let k = kappa_unchecked(mode, u, geometry);
        report.laplacian = report.laplacian.max(residual(lap, c_scale(g, k), g, k));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DegenerationSchedule;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn tube(radius: f64, r0: f64) -> TubeGeometry {
        DegenerationSchedule::unit(vec![radius])
            .unwrap()
            .instantiate(0)
            .unwrap()
            .with_inner(r0)
            .unwrap()
    }

    #[test]
    fn zero_mode_has_zero_eigenvalue() {
        let g = tube(6.0, 2.0);
        for u in [2.0, 3.3, 5.0] {
            assert_eq!(kappa(ModeIndex::ZERO, u, &g).unwrap().kappa, 0.0);
        }
    }

    #[test]
    fn limit_check_with_unit_warping() {
        let k = kappa_from_metric(ModeIndex::new(0, 1), 1.0, 0.0, 2.0 * PI, 0.3);
        assert_relative_eq!(k, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn untwisted_radial_mode_at_outer_edge() {
        let g = TubeGeometry::new(6.0, 2.0, 5.0, (-12.0f64).exp(), 0.0).unwrap();
        let k = kappa(ModeIndex::new(1, 0), 5.0, &g).unwrap().kappa;
        // 1/sinh²(1), 40-digit mpmath reference
        assert_relative_eq!(k, 0.7240616609663104, max_relative = 1e-14);
    }

    #[test]
    fn kappa_rejects_core_geodesic() {
        let g = tube(6.0, 2.0);
        assert!(kappa(ModeIndex::new(1, 0), 6.0, &g).is_err());
        assert!(kappa(ModeIndex::new(1, 0), 7.0, &g).is_err());
    }

    #[test]
    fn enumeration_sizes_and_order() {
        assert_eq!(enumerate_modes(0), vec![ModeIndex::ZERO]);
        assert_eq!(enumerate_modes(1).len(), 9);
        let m2 = enumerate_modes(2);
        assert_eq!(m2.len(), 25);
        assert_eq!(m2[0], ModeIndex::new(-2, -2));
        assert!(m2.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn kappa_symmetric_under_negation() {
        let g = tube(8.0, 1.0);
        for mode in enumerate_modes(3) {
            for u in [1.0, 4.0, 6.9] {
                let a = kappa(mode, u, &g).unwrap().kappa;
                let b = kappa(mode.negated(), u, &g).unwrap().kappa;
                assert_eq!(a, b);
                assert_eq!(a > 0.0, !mode.is_zero());
            }
        }
    }

    /// Brute force over a large lattice and fine grid; independent of the
    /// certificate machinery.
    fn brute_min(g: &TubeGeometry, m: i64, du: f64) -> (f64, ModeIndex) {
        let (a, b) = g.interval().unwrap();
        let n = ((b - a) / du).ceil() as usize;
        let mut best = (f64::INFINITY, ModeIndex::ZERO);
        for i in 0..=n {
            let u = a + (b - a) * i as f64 / n as f64;
            for r in -m..=m {
                for s in -m..=m {
                    let mode = ModeIndex::new(r, s);
                    if mode.is_zero() {
                        continue;
                    }
                    let k = kappa(mode, u, g).unwrap().kappa;
                    if k < best.0 {
                        best = (k, mode);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn min_offzero_matches_doubled_brute_force() {
        let g = tube(8.0, 3.0);
        let found = min_offzero_kappa(&g, 2).unwrap();
        let (brute, _) = brute_min(&g, 4, 5e-4);
        assert_relative_eq!(found.value, brute, max_relative = 1e-9);
        assert!(found.value > 0.0);
        assert!(found.tail_bound >= found.value);
        // κ ≥ (E1/D2 e^{r0})² under the unit schedule
        assert!(found.value >= (3.0f64).exp().powi(2));
    }

    #[test]
    fn untwisted_minimiser_is_an_axis_mode() {
        let g = TubeGeometry::new(6.0, 2.0, 5.0, (-12.0f64).exp(), 0.0).unwrap();
        let found = min_offzero_kappa(&g, 3).unwrap();
        let (_, mode) = brute_min(&g, 6, 1e-3);
        assert!(mode.r.abs() + mode.s.abs() == 1, "{mode:?}");
        assert!(found.mode.r.abs() + found.mode.s.abs() == 1, "{:?}", found.mode);
    }

    #[test]
    fn tail_bound_is_a_lower_bound_outside_the_box() {
        // small ε and a twist chosen so that s ≠ 0 rows come close to zero
        let g = TubeGeometry::new(3.0, 0.5, 2.0, 0.05, 0.7).unwrap();
        for m in [1u32, 2, 4] {
            for u in [0.5, 1.2, 2.0] {
                let bound = kappa_tail_bound(&g, m, u);
                let mut outside_min = f64::INFINITY;
                for r in -60i64..=60 {
                    for s in -60i64..=60 {
                        if r.unsigned_abs() as u32 > m || s.unsigned_abs() as u32 > m {
                            let k = kappa(ModeIndex::new(r, s), u, &g).unwrap().kappa;
                            outside_min = outside_min.min(k);
                        }
                    }
                }
                assert!(bound <= outside_min * (1.0 + 1e-12), "m={m} u={u}");
            }
        }
    }

    #[test]
    fn certificate_reports_failure_for_tiny_lattice() {
        // ρ = 2π/3 makes 2πs + rρ vanish on (3k, -k): those modes sit far
        // outside a small box yet have the smallest κ
        let g = TubeGeometry::new(3.0, 0.5, 2.0, 1e-2, 2.0 * PI / 3.0).unwrap();
        assert!(matches!(
            min_offzero_kappa(&g, 1),
            Err(Error::Truncation { .. })
        ));
        let cert = certify_window(&g, 2.0).unwrap();
        assert!(cert.boundary_kappa_min > 2.0);
        // every mode outside the certified lattice really is above the target
        let m = cert.m_max as i64;
        for r in -(m + 10)..=(m + 10) {
            for s in -(m + 10)..=(m + 10) {
                if r.abs() > m || s.abs() > m {
                    assert!(kappa_infimum(ModeIndex::new(r, s), &g).unwrap() > 2.0);
                }
            }
        }
    }

    #[test]
    fn schedule_lower_bound_on_kappa() {
        for radius in [6.0, 8.0, 10.0] {
            for r0 in [0.5, 1.0, 2.0] {
                let g = tube(radius, r0);
                let found = min_offzero_kappa(&g, 2).unwrap();
                assert!(found.value >= (2.0 * r0).exp(), "R={radius} r0={r0}");
            }
        }
    }

    #[test]
    fn zero_mode_identities_hold_to_rounding() {
        let g = tube(6.0, 2.0);
        let rep = verify_mode_identities(ModeIndex::ZERO, &g, &[2.5, 3.5, 4.5]).unwrap();
        assert!(rep.dt < 1e-12 && rep.dtheta < 1e-12 && rep.laplacian < 1e-12, "{rep:?}");
        assert!(rep.passed(1e-6));
    }

    #[test]
    fn mode_identities_for_twisted_mode() {
        let g = tube(6.0, 2.0);
        let rep = verify_mode_identities(ModeIndex::new(1, 1), &g, &[2.2, 3.0, 4.0, 4.8]).unwrap();
        assert!(rep.passed(1e-6), "{rep:?}");
        assert!(verify_mode_identities(ModeIndex::new(1, 1), &g, &[2.0]).is_err());
    }
}
