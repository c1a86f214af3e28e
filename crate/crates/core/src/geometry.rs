//! Warped-product model of a hyperbolic tube.
//!
//! Throughout, `u = R - r` is the distance from the outer boundary of the
//! tube of radius `R`; the fibre over `u` is a flat torus with metric
//! `f(u)² dt² + h(u)² dθ²`, `f = cosh(R - u)`, `h = sinh(R - u)`.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Truncated hyperbolic tube `{r0 ≤ u ≤ R0}` around a closed geodesic of
/// length `epsilon` and twist `rho`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeGeometry {
    radius: f64,
    inner: Option<f64>,
    outer: f64,
    epsilon: f64,
    rho: f64,
}

impl TubeGeometry {
    /// Validated tube with every truncation fixed.
    pub fn new(radius: f64, r0: f64, r_outer: f64, epsilon: f64, rho: f64) -> Result<Self> {
        let g = Self::without_inner(radius, r_outer, epsilon, rho)?;
        g.with_inner(r0)
    }

    /// Tube whose inner truncation is still to be chosen (see
    /// [`crate::tube_spectrum::find_r0`]).
    pub fn without_inner(radius: f64, r_outer: f64, epsilon: f64, rho: f64) -> Result<Self> {
        let all_finite = [radius, r_outer, epsilon, rho].iter().all(|x| x.is_finite());
        if !all_finite {
            return Err(Error::InvalidGeometry("non-finite parameter".into()));
        }
        if radius <= 0.0 {
            return Err(Error::InvalidGeometry(format!("R = {radius} must be > 0")));
        }
        if !(r_outer > 0.0 && r_outer < radius) {
            return Err(Error::InvalidGeometry(format!(
                "R0 = {r_outer} must lie in (0, R = {radius})"
            )));
        }
        if epsilon <= 0.0 {
            return Err(Error::InvalidGeometry(format!("epsilon = {epsilon} must be > 0")));
        }
        if !(0.0..core::f64::consts::PI).contains(&rho) {
            return Err(Error::InvalidGeometry(format!("rho = {rho} must lie in [0, pi)")));
        }
        Ok(Self {
            radius,
            inner: None,
            outer: r_outer,
            epsilon,
            rho,
        })
    }

    /// Copy with the inner truncation set to `r0`.
    pub fn with_inner(&self, r0: f64) -> Result<Self> {
        if !(r0.is_finite() && r0 >= 0.0 && r0 < self.outer) {
            return Err(Error::InvalidGeometry(format!(
                "r0 = {r0} must satisfy 0 <= r0 < R0 = {}",
                self.outer
            )));
        }
        Ok(Self {
            inner: Some(r0),
            ..*self
        })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Inner truncation `r0`; fails while it is unset.
    pub fn inner(&self) -> Result<f64> {
        self.inner.ok_or(Error::InnerUnset)
    }

    pub fn inner_opt(&self) -> Option<f64> {
        self.inner
    }

    pub fn outer(&self) -> f64 {
        self.outer
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// `[r0, R0]`.
    pub fn interval(&self) -> Result<(f64, f64)> {
        Ok((self.inner()?, self.outer))
    }

    /// Whether `D1 e^{-2R} ≤ ε ≤ D2 e^{-2R}` and `E1 e^{-R} ≤ ρ ≤ E2 e^{-R}`.
    ///
    /// A relative slack of a few ulps is allowed so that geometries produced
    /// by [`DegenerationSchedule::instantiate`] always pass.
    pub fn satisfies_schedule(&self, schedule: &DegenerationSchedule) -> bool {
        let slack = 1.0 + 8.0 * f64::EPSILON;
        let e2 = (-2.0 * self.radius).exp();
        let e1 = (-self.radius).exp();
        let (d1, d2, f1, f2) = schedule.constants();
        self.epsilon * slack >= d1 * e2
            && self.epsilon <= d2 * e2 * slack
            && self.rho * slack >= f1 * e1
            && self.rho <= f2 * e1 * slack
    }

    pub fn profile(&self) -> WarpedProfile {
        WarpedProfile { geometry: *self }
    }
}

/// Metric functions of the fibres `F_u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WarpedProfile {
    geometry: TubeGeometry,
}

impl WarpedProfile {
    pub fn geometry(&self) -> &TubeGeometry {
        &self.geometry
    }

    /// `cosh(R - u)`
    pub fn f(&self, u: f64) -> f64 {
        (self.geometry.radius - u).cosh()
    }

    /// `sinh(R - u)`
    pub fn h(&self, u: f64) -> f64 {
        (self.geometry.radius - u).sinh()
    }

    /// `d/du log(f h) = -(tanh(R-u) + coth(R-u))`.
    pub fn log_fh_derivative(&self, u: f64) -> f64 {
        let x = self.geometry.radius - u;
        -(x.tanh() + 1.0 / x.tanh())
    }

    /// `d²/du² log(f h) = sech²(R-u) - csch²(R-u)`.
    pub fn log_fh_second_derivative(&self, u: f64) -> f64 {
        let x = self.geometry.radius - u;
        let sech = 1.0 / x.cosh();
        let csch = 1.0 / x.sinh();
        sech * sech - csch * csch
    }

    /// Mean curvature `H = -½ (log f h)'` of the fibre.
    pub fn mean_curvature(&self, u: f64) -> f64 {
        -0.5 * self.log_fh_derivative(u)
    }

    /// Robin coefficient `β = (log f h)' = -2H` of the absolute condition.
    pub fn robin_beta(&self, u: f64) -> f64 {
        self.log_fh_derivative(u)
    }
}

/// Admissible `(R, ε, ρ)` along a degenerating family.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerationSchedule {
    d1: f64,
    d2: f64,
    e1: f64,
    e2: f64,
    r_grid: Vec<f64>,
}

impl DegenerationSchedule {
    pub fn new(d1: f64, d2: f64, e1: f64, e2: f64, r_grid: Vec<f64>) -> Result<Self> {
        if !(d1 > 0.0 && d1 <= d2 && d2.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "schedule needs 0 < D1 <= D2, got D1 = {d1}, D2 = {d2}"
            )));
        }
        if !(e1 > 0.0 && e1 <= e2 && e2.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "schedule needs 0 < E1 <= E2, got E1 = {e1}, E2 = {e2}"
            )));
        }
        if r_grid.iter().any(|r| !r.is_finite() || *r <= 1.0) {
            return Err(Error::InvalidGeometry(
                "R_grid entries must be finite and > 1 (R0 = R - 1 must be positive)".into(),
            ));
        }
        if r_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidGeometry("R_grid must be strictly increasing".into()));
        }
        Ok(Self {
            d1,
            d2,
            e1,
            e2,
            r_grid,
        })
    }

    /// `D1 = D2 = E1 = E2 = 1`.
    pub fn unit(r_grid: Vec<f64>) -> Result<Self> {
        Self::new(1.0, 1.0, 1.0, 1.0, r_grid)
    }

    /// `(D1, D2, E1, E2)`
    pub fn constants(&self) -> (f64, f64, f64, f64) {
        (self.d1, self.d2, self.e1, self.e2)
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.r_grid
    }

    /// Geometry at `R = R_grid[j]` with `ε = D1 e^{-2R}`, `ρ = E1 e^{-R}`,
    /// `R0 = R - 1` and `r0` left unset.
    pub fn instantiate(&self, j: usize) -> Result<TubeGeometry> {
        let radius = *self.r_grid.get(j).ok_or(Error::IndexOutOfRange {
            index: j,
            len: self.r_grid.len(),
        })?;
        TubeGeometry::without_inner(
            radius,
            radius - 1.0,
            self.d1 * (-2.0 * radius).exp(),
            self.e1 * (-radius).exp(),
        )
    }
}

/// Deviations `(φ(u), ψ(u))` of the exact tube metric
/// `du² + e^{-2u}{(1+φ)cosh²R dt² + (1+ψ)sinh²R dθ²}` from the warped
/// product `du² + e^{-2u}{cosh²R dt² + sinh²R dθ²}`.
pub fn aux_phi_psi(geometry: &TubeGeometry, u: f64) -> Result<(f64, f64)> {
    let radius = geometry.radius();
    if !(0.0..=radius).contains(&u) {
        return Err(Error::Domain {
            what: "u",
            value: u,
            domain: format!("[0, {radius}]"),
        });
    }
    let grow = (2.0 * u).exp_m1();
    let tail = (-2.0 * radius).exp() * (1.0 + (2.0 * u).exp());
    let c = radius.cosh();
    let s = radius.sinh();
    let phi = 0.25 * grow / (c * c) * (tail + 2.0);
    let psi = 0.25 * grow / (s * s) * (tail - 2.0);
    Ok((phi, psi))
}
