//! Symmetric tridiagonal eigenvalues by Sturm-sequence bisection.

#[allow(unused_imports)]
use num_traits::Float;

/// Symmetric tridiagonal matrix: `diag[i] = T_ii`, `off[i] = T_{i,i+1}`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SymTridiagonal {
    pub diag: alloc::vec::Vec<f64>,
    pub off: alloc::vec::Vec<f64>,
}

impl SymTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    /// Number of eigenvalues strictly below `x` (negative LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let guard = f64::MIN_POSITIVE.sqrt() * (1.0 + self.norm_inf());
        let mut count = 0;
        let mut pivot = self.diag[0] - x;
        if pivot < 0.0 {
            count += 1;
        }
        for i in 1..self.diag.len() {
            let p = if pivot.abs() < guard {
                guard.copysign(pivot)
            } else {
                pivot
            };
            pivot = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / p;
            if pivot < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn norm_inf(&self) -> f64 {
        let n = self.diag.len();
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// `k`-th smallest eigenvalue (0-based), bisected to rounding level.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        debug_assert!(k < self.len());
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use core::f64::consts::PI;

    #[test]
    fn discrete_dirichlet_laplacian() {
        let n = 50;
        let t = SymTridiagonal {
            diag: vec![2.0; n],
            off: vec![-1.0; n - 1],
        };
        for k in 0..n {
            let exact = 4.0 * (PI * (k + 1) as f64 / (2.0 * (n + 1) as f64)).sin().powi(2);
            assert!((t.eigenvalue(k) - exact).abs() < 1e-13);
        }
        assert_eq!(t.count_below(0.0), 0);
        assert_eq!(t.count_below(4.1), n);
    }
}
