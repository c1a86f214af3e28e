//! 1-D self-adjoint eigenproblems `-a'' + q(u) a = λ a` on `[m0, m1]`.
//!
//! Boundary conditions are Dirichlet or Robin `a'(m) - β a(m) = 0`, with the
//! coordinate derivative at both ends (no outward-normal sign flip).
//!
//! Two independent solvers are provided: a symmetric finite-difference
//! discretisation with Richardson extrapolation ([`solve_fd`]) and Prüfer
//! shooting ([`solve_shooting`], [`count_below`]). [`cross_validate`] runs
//! both and compares them against their error estimates.

mod fd;
mod shooting;
pub(crate) mod tridiag;

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Result};

pub use fd::{fd_eigenvalues_by_index, solve_fd};
pub use shooting::{count_below, eigenvalue_by_index, lowest_eigenvalue, solve_shooting};

/// Intervals shorter than this are rejected.
pub const MIN_INTERVAL: f64 = 1e-6;

/// Smallest admissible finite-difference resolution.
pub const MIN_GRID: usize = 16;

/// A potential `q(u)`.
pub trait Potential {
    fn eval(&self, u: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Potential for F {
    fn eval(&self, u: f64) -> f64 {
        self(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet,
    /// `a' - beta a = 0`
    Robin { beta: f64 },
}

impl BoundaryCondition {
    pub fn robin(beta: f64) -> Self {
        BoundaryCondition::Robin { beta }
    }

    pub fn neumann() -> Self {
        BoundaryCondition::Robin { beta: 0.0 }
    }
}

#[derive(Debug, Clone)]
pub struct SlProblem<P> {
    potential: P,
    m0: f64,
    m1: f64,
    left: BoundaryCondition,
    right: BoundaryCondition,
}

impl<P: Potential> SlProblem<P> {
    pub fn new(
        potential: P,
        m0: f64,
        m1: f64,
        left: BoundaryCondition,
        right: BoundaryCondition,
    ) -> Result<Self> {
        if !(m0.is_finite() && m1.is_finite()) || m1 - m0 < MIN_INTERVAL {
            return Err(Error::InvalidProblem(format!(
                "interval [{m0}, {m1}] must be finite with length >= {MIN_INTERVAL}"
            )));
        }
        for bc in [left, right] {
            if let BoundaryCondition::Robin { beta } = bc {
                if !beta.is_finite() {
                    return Err(Error::InvalidProblem(format!("Robin beta = {beta} is not finite")));
                }
            }
        }
        Ok(Self {
            potential,
            m0,
            m1,
            left,
            right,
        })
    }

    pub fn q(&self, u: f64) -> f64 {
        self.potential.eval(u)
    }

    pub fn potential(&self) -> &P {
        &self.potential
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.m0, self.m1)
    }

    pub fn len(&self) -> f64 {
        self.m1 - self.m0
    }

    pub fn left(&self) -> BoundaryCondition {
        self.left
    }

    pub fn right(&self) -> BoundaryCondition {
        self.right
    }

    /// `(min q, max q)` over `samples + 1` equispaced points; rejects
    /// non-finite values.
    pub fn potential_range(&self, samples: usize) -> Result<(f64, f64)> {
        let n = samples.max(1);
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..=n {
            let u = self.m0 + self.len() * i as f64 / n as f64;
            let q = self.q(u);
            if !q.is_finite() {
                return Err(Error::InvalidProblem(format!("q({u}) = {q} is not finite")));
            }
            lo = lo.min(q);
            hi = hi.max(q);
        }
        Ok((lo, hi))
    }

    /// Constant `C(β) ≥ 0` with `∫a'² + boundary terms ≥ -C ∫a²`.
    ///
    /// An attractive end (left `β < 0`, right `β > 0`) of strength `γ`
    /// contributes `γ² + γ/s`, with `s` the length of the sub-interval it owns
    /// (the whole interval, or half of it when both ends are attractive).
    pub fn boundary_shift(&self) -> f64 {
        let gamma_left = match self.left {
            BoundaryCondition::Robin { beta } if beta < 0.0 => -beta,
            _ => 0.0,
        };
        let gamma_right = match self.right {
            BoundaryCondition::Robin { beta } if beta > 0.0 => beta,
            _ => 0.0,
        };
        let both = gamma_left > 0.0 && gamma_right > 0.0;
        let s = if both { 0.5 * self.len() } else { self.len() };
        [gamma_left, gamma_right]
            .into_iter()
            .filter(|g| *g > 0.0)
            .map(|g| g * g + g / s)
            .sum()
    }

    /// Form lower bound `inf q - C(β)` of the spectrum (with `inf q` sampled).
    pub fn spectral_lower_bound(&self, samples: usize) -> Result<f64> {
        Ok(self.potential_range(samples)?.0 - self.boundary_shift())
    }
}

/// Eigenvalue window; eigenvalues `λ` with `lo < λ < hi` are reported
/// (ties at the endpoints are resolved by the solver's counting).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::InvalidInput(format!("window ({lo}, {hi}) must be finite and nonempty")));
        }
        Ok(Self { lo, hi })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    FiniteDifference,
    Shooting,
    CrossValidated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    /// Sorted ascending.
    pub eigenvalues: Vec<f64>,
    pub error_estimates: Vec<f64>,
    /// Index (0-based, counted from the bottom of the spectrum) of the first
    /// reported eigenvalue.
    pub first_index: usize,
    pub method: Method,
    /// Finite-difference resolution (0 for pure shooting).
    pub grid_n: usize,
}

impl SpectrumResult {
    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Both solvers on the same problem and window.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub fd: SpectrumResult,
    pub shooting: SpectrumResult,
    /// Shooting values with error `max(err_shoot, |λ_fd - λ_shoot|)`; its
    /// method is `CrossValidated` only if `agree`.
    pub combined: SpectrumResult,
    /// `|λ_fd - λ_shoot| ≤ err_fd + err_shoot` for every eigenvalue.
    pub agree: bool,
    pub max_discrepancy: f64,
}

/// Runs shooting on the window and finite differences on the same indices.
pub fn cross_validate<P: Potential>(
    problem: &SlProblem<P>,
    grid_n: usize,
    window: Window,
) -> Result<CrossValidation> {
    let shooting = solve_shooting(problem, window)?;
    let indices: Vec<usize> = (shooting.first_index..shooting.first_index + shooting.len()).collect();
    let fd = fd_eigenvalues_by_index(problem, grid_n, &indices)?;
    Ok(combine(fd, shooting))
}

pub(crate) fn combine(fd: SpectrumResult, shooting: SpectrumResult) -> CrossValidation {
    let mut agree = fd.len() == shooting.len();
    let mut max_discrepancy: f64 = 0.0;
    let mut errors = Vec::with_capacity(shooting.len());
    for i in 0..shooting.len().min(fd.len()) {
        let diff = (fd.eigenvalues[i] - shooting.eigenvalues[i]).abs();
        max_discrepancy = max_discrepancy.max(diff);
        if diff > fd.error_estimates[i] + shooting.error_estimates[i] {
            agree = false;
        }
        errors.push(shooting.error_estimates[i].max(diff));
    }
    let combined = SpectrumResult {
        eigenvalues: shooting.eigenvalues.clone(),
        error_estimates: errors,
        first_index: shooting.first_index,
        method: if agree { Method::CrossValidated } else { Method::Shooting },
        grid_n: fd.grid_n,
    };
    CrossValidation {
        fd,
        shooting,
        combined,
        agree,
        max_discrepancy,
    }
}

/// Lowest eigenvalue by both solvers.
pub fn cross_validate_lowest<P: Potential>(
    problem: &SlProblem<P>,
    grid_n: usize,
) -> Result<CrossValidation> {
    let (value, err) = lowest_eigenvalue(problem)?;
    let shooting = SpectrumResult {
        eigenvalues: alloc::vec![value],
        error_estimates: alloc::vec![err],
        first_index: 0,
        method: Method::Shooting,
        grid_n: 0,
    };
    let fd = fd_eigenvalues_by_index(problem, grid_n, &[0])?;
    Ok(combine(fd, shooting))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn rejects_degenerate_problems() {
        let q = |_u: f64| 0.0;
        let d = BoundaryCondition::Dirichlet;
        assert!(SlProblem::new(q, 0.0, 1e-7, d, d).is_err());
        assert!(SlProblem::new(q, 1.0, 0.0, d, d).is_err());
        assert!(SlProblem::new(q, 0.0, 1.0, BoundaryCondition::robin(f64::NAN), d).is_err());
        let bad = SlProblem::new(|u: f64| 1.0 / (u - 0.5), 0.0, 1.0, d, d).unwrap();
        assert!(bad.potential_range(64).is_err());
        assert!(Window::new(1.0, 1.0).is_err());
    }

    #[test]
    fn boundary_shift_cases() {
        let q = |_u: f64| 0.0;
        let d = BoundaryCondition::Dirichlet;
        let p = SlProblem::new(q, 0.0, PI, d, d).unwrap();
        assert_eq!(p.boundary_shift(), 0.0);
        // repulsive ends contribute nothing
        let p = SlProblem::new(q, 0.0, 2.0, BoundaryCondition::robin(1.0), BoundaryCondition::robin(-1.0)).unwrap();
        assert_eq!(p.boundary_shift(), 0.0);
        // attractive left end of strength 2 on length 2: 4 + 1
        let p = SlProblem::new(q, 0.0, 2.0, BoundaryCondition::robin(-2.0), d).unwrap();
        assert_eq!(p.boundary_shift(), 5.0);
        // both attractive: each owns half the interval
        let p = SlProblem::new(q, 0.0, 2.0, BoundaryCondition::robin(-2.0), BoundaryCondition::robin(2.0)).unwrap();
        assert_eq!(p.boundary_shift(), 12.0);
    }
}
