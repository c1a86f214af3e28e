//! Second-order finite differences with ghost-point Robin rows.

use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::tridiag::SymTridiagonal;
use super::{BoundaryCondition, Method, Potential, SlProblem, SpectrumResult, Window, MIN_GRID};
use crate::{Error, Result};

/// Symmetrised matrix on a grid of `n` cells.
pub(crate) fn assemble<P: Potential>(problem: &SlProblem<P>, n: usize) -> Result<SymTridiagonal> {
    let (m0, m1) = problem.interval();
    let h = (m1 - m0) / n as f64;
    let ih2 = 1.0 / (h * h);
    let first = match problem.left() {
        BoundaryCondition::Dirichlet => 1,
        BoundaryCondition::Robin { .. } => 0,
    };
    let last = match problem.right() {
        BoundaryCondition::Dirichlet => n - 1,
        BoundaryCondition::Robin { .. } => n,
    };
    let size = last - first + 1;
    let mut diag = Vec::with_capacity(size);
    // sub[i] couples row i+1 to column i, sup[i] couples row i to column i+1
    let mut sub = Vec::with_capacity(size - 1);
    let mut sup = Vec::with_capacity(size - 1);
    for node in first..=last {
        let u = if node == n { m1 } else { m0 + node as f64 * h };
        let q = problem.q(u);
        if !q.is_finite() {
            return Err(Error::InvalidProblem(format!("q({u}) = {q} is not finite")));
        }
        let d = match (node, problem.left(), problem.right()) {
            (0, BoundaryCondition::Robin { beta }, _) => (2.0 + 2.0 * h * beta) * ih2,
            (k, _, BoundaryCondition::Robin { beta }) if k == n => (2.0 - 2.0 * h * beta) * ih2,
            _ => 2.0 * ih2,
        };
        diag.push(d + q);
        if node < last {
            let right_ghost = node + 1 == n && matches!(problem.right(), BoundaryCondition::Robin { .. });
            sub.push(if right_ghost { -2.0 * ih2 } else { -ih2 });
            sup.push(if node == 0 { -2.0 * ih2 } else { -ih2 });
        }
    }
    let off = sub
        .iter()
        .zip(&sup)
        .map(|(l, r)| {
            let product = l * r;
            assert!(product > 0.0, "finite-difference matrix is not symmetrisable");
            -product.sqrt()
        })
        .collect();
    Ok(SymTridiagonal { diag, off })
}

fn check_grid(grid_n: usize) -> Result<()> {
    if grid_n < MIN_GRID {
        return Err(Error::InvalidProblem(format!("grid_n = {grid_n} < {MIN_GRID}")));
    }
    Ok(())
}

/// Finite-difference eigenvalues with the given 0-based indices.
///
/// Each is computed on `n`, `2n` and `4n` cells; the reported value is the
/// Richardson extrapolant of the two finer grids and the error estimate is
/// its distance to the coarser extrapolant plus a rounding floor.
pub fn fd_eigenvalues_by_index<P: Potential>(
    problem: &SlProblem<P>,
    grid_n: usize,
    indices: &[usize],
) -> Result<SpectrumResult> {
    check_grid(grid_n)?;
    let levels = [
        assemble(problem, grid_n)?,
        assemble(problem, 2 * grid_n)?,
        assemble(problem, 4 * grid_n)?,
    ];
    if let Some(&k) = indices.iter().find(|&&k| k >= levels[0].len()) {
        return Err(Error::IndexOutOfRange {
            index: k,
            len: levels[0].len(),
        });
    }
    let floor = 8.0 * f64::EPSILON * levels[2].norm_inf();
    let mut eigenvalues = Vec::with_capacity(indices.len());
    let mut error_estimates = Vec::with_capacity(indices.len());
    for &k in indices {
        let [a, b, c] = [levels[0].eigenvalue(k), levels[1].eigenvalue(k), levels[2].eigenvalue(k)];
        let coarse = (4.0 * b - a) / 3.0;
        let fine = (4.0 * c - b) / 3.0;
        eigenvalues.push(fine);
        error_estimates.push((fine - coarse).abs() + floor);
    }
    Ok(SpectrumResult {
        eigenvalues,
        error_estimates,
        first_index: indices.first().copied().unwrap_or(0),
        method: Method::FiniteDifference,
        grid_n,
    })
}

/// Finite-difference eigenvalues in the window, counted on the finest grid.
pub fn solve_fd<P: Potential>(
    problem: &SlProblem<P>,
    grid_n: usize,
    window: Window,
) -> Result<SpectrumResult> {
    check_grid(grid_n)?;
    let fine = assemble(problem, 4 * grid_n)?;
    let lo = fine.count_below(window.lo);
    let hi = fine.count_below(window.hi);
    let indices: Vec<usize> = (lo..hi).collect();
    let mut result = fd_eigenvalues_by_index(problem, grid_n, &indices)?;
    result.first_index = lo;
    Ok(result)
}
