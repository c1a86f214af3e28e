//! Rolled-up de Rham complexes on discretised circles and intervals.
//!
//! The graded space is `V = V₊ ⊕ V₋` (functions, then 1-form coefficients)
//! with the Euclidean inner product. For a difference operator
//! `D: V₊ → V₋` the complex carries
//!
//! ```text
//! d = [[0, 0], [D, 0]],  δ = dᵀ,  T = diag(I, -I),  Q = d + δ,  P = Q²
//! ```
//!
//! so that `d = ½(1 - T)Q` and `δ = ½(1 + T)Q`.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::PI;
use nalgebra::{DMatrix, SymmetricEigen};
#[allow(unused_imports)]
use num_traits::Float;

use crate::dissection::{c_rho_from_samples, laplacian_bound, BoundResult, CoverSpec, NConvention};
use crate::{Error, Result};

/// Relative tolerance for grouping eigenvalues.
pub const GROUP_REL_TOL: f64 = 1e-9;

/// Absolute floor for grouping, as a multiple of `max(1, spectral radius)`.
pub const GROUP_ABS_TOL: f64 = 1e-12;

/// Relative cut-off for eigenvalues of `m mᵀ` counted in the rank of `m`.
const RANK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    /// 1-form coefficients vanish at the endpoints (Neumann on functions).
    Absolute,
    /// Functions vanish at the endpoints (Dirichlet on functions).
    Relative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracComplexMatrix {
    dim_plus: usize,
    dim_minus: usize,
    derivative: DMatrix<f64>,
    d: DMatrix<f64>,
    delta: DMatrix<f64>,
    t: DMatrix<f64>,
    q: DMatrix<f64>,
    p: DMatrix<f64>,
}

impl DiracComplexMatrix {
    /// Complex generated by `D: V₊ → V₋` (a `dim_minus × dim_plus` matrix).
    pub fn from_derivative(derivative: DMatrix<f64>) -> Self {
        let (dim_minus, dim_plus) = derivative.shape();
        let n = dim_plus + dim_minus;
        let mut d = DMatrix::zeros(n, n);
        d.view_mut((dim_plus, 0), (dim_minus, dim_plus)).copy_from(&derivative);
        let delta = d.transpose();
        let mut t = DMatrix::identity(n, n);
        for i in dim_plus..n {
            t[(i, i)] = -1.0;
        }
        let q = &d + &delta;
        let p = &q * &q;
        Self {
            dim_plus,
            dim_minus,
            derivative,
            d,
            delta,
            t,
            q,
            p,
        }
    }

    pub fn dim_plus(&self) -> usize {
        self.dim_plus
    }

    pub fn dim_minus(&self) -> usize {
        self.dim_minus
    }

    pub fn dim(&self) -> usize {
        self.dim_plus + self.dim_minus
    }

    /// The block `D: V₊ → V₋`.
    pub fn derivative(&self) -> &DMatrix<f64> {
        &self.derivative
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn delta(&self) -> &DMatrix<f64> {
        &self.delta
    }

    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// Block-diagonal sum, grading preserved.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (m1, p1) = self.derivative.shape();
        let (m2, p2) = other.derivative.shape();
        let mut block = DMatrix::zeros(m1 + m2, p1 + p2);
        block.view_mut((0, 0), (m1, p1)).copy_from(&self.derivative);
        block.view_mut((m1, p1), (m2, p2)).copy_from(&other.derivative);
        Self::from_derivative(block)
    }

    /// Eigenvalues of `P` ascending, with matching orthonormal eigenvectors.
    pub fn spectrum(&self) -> (Vec<f64>, DMatrix<f64>) {
        sorted_eigen(&self.p)
    }
}

fn sorted_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..m.nrows()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(m.nrows(), m.nrows(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Nonzero eigenpairs of `m mᵀ`, whose eigenvectors span the column space of
/// `m`. (The symmetric eigensolver gives markedly more accurate vectors here
/// than the SVD.)
fn gram_range(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if m.ncols() == 0 {
        return (Vec::new(), DMatrix::zeros(n, 0));
    }
    let (values, vectors) = sorted_eigen(&(m * m.transpose()));
    let top = values.last().copied().unwrap_or(0.0);
    let keep: Vec<usize> = (0..n).filter(|&i| top > 0.0 && values[i] > RANK_TOL * top).collect();
    (
        keep.iter().map(|&i| values[i]).collect(),
        DMatrix::from_fn(n, keep.len(), |r, c| vectors[(r, keep[c])]),
    )
}

/// Orthonormal basis (as columns) of the column space of `m`.
fn range_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    gram_range(m).1
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0, |a, b| a.max(b.abs()))
}

fn group_tol(a: f64, b: f64, radius: f64) -> f64 {
    GROUP_REL_TOL * a.abs().max(b.abs()) + GROUP_ABS_TOL * radius.max(1.0)
}

/// Splits an ascending list into runs of equal eigenvalues; returns
/// `(first, len)` per run.
fn group_runs(values: &[f64], radius: f64) -> Vec<(usize, usize)> {
    let mut runs: Vec<(usize, usize)> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match runs.last_mut() {
            Some((start, len)) if (v - values[*start + *len - 1]).abs() <= group_tol(v, values[*start + *len - 1], radius) => {
                *len += 1
            }
            _ => runs.push((i, 1)),
        }
    }
    runs
}

fn check_nodes(n: usize) -> Result<()> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("need at least 4 nodes, got {n}")));
    }
    Ok(())
}

fn check_length(length: f64) -> Result<()> {
    if !(length.is_finite() && length > 0.0) {
        return Err(Error::InvalidInput(format!("length = {length} must be > 0")));
    }
    Ok(())
}

/// `n` periodic nodes on a circle of the given length; edge `i` joins node
/// `i` to `i + 1`.
pub fn build_circle_complex(n: usize, length: f64) -> Result<DiracComplexMatrix> {
    check_nodes(n)?;
    check_length(length)?;
    let step = length / n as f64;
    let mut block = DMatrix::zeros(n, n);
    for i in 0..n {
        block[(i, i)] = -1.0 / step;
        block[(i, (i + 1) % n)] = 1.0 / step;
    }
    Ok(DiracComplexMatrix::from_derivative(block))
}

/// `n` nodes spanning an interval; the boundary condition removes the
/// constrained boundary coefficients.
pub fn build_interval_complex(n: usize, length: f64, condition: BoundaryKind) -> Result<DiracComplexMatrix> {
    check_nodes(n)?;
    check_length(length)?;
    let step = length / (n - 1) as f64;
    let edges = n - 1;
    let block = match condition {
        BoundaryKind::Absolute => DMatrix::from_fn(edges, n, |e, v| {
            if v == e {
                -1.0 / step
            } else if v == e + 1 {
                1.0 / step
            } else {
                0.0
            }
        }),
        // interior nodes 1..n-1 become columns 0..n-2
        BoundaryKind::Relative => DMatrix::from_fn(edges, n - 2, |e, c| {
            let v = c + 1;
            if v == e {
                -1.0 / step
            } else if v == e + 1 {
                1.0 / step
            } else {
                0.0
            }
        }),
    };
    Ok(DiracComplexMatrix::from_derivative(block))
}

/// Algebraic identities and the harmonic/exact/coexact split.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionReport {
    pub dim_total: usize,
    pub dim_kernel: usize,
    pub dim_exact: usize,
    pub dim_coexact: usize,
    /// Largest inner product between bases of different summands.
    pub orthogonality_residual: f64,
    pub d_squared: f64,
    pub delta_squared: f64,
    /// `max |δ - dᵀ|`, the discrete Green identity on basis vectors.
    pub green_residual: f64,
    pub t_squared: f64,
    pub anticommutator: f64,
    /// `max |P - (dδ + δd)|`
    pub laplacian_split: f64,
}

impl DecompositionReport {
    pub fn max_identity_residual(&self) -> f64 {
        [
            self.d_squared,
            self.delta_squared,
            self.green_residual,
            self.t_squared,
            self.anticommutator,
            self.laplacian_split,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.dim_kernel + self.dim_exact + self.dim_coexact == self.dim_total
            && self.orthogonality_residual <= tol
            && self.max_identity_residual() <= tol
    }
}

pub fn verify_decomposition(complex: &DiracComplexMatrix) -> DecompositionReport {
    let c = complex;
    let n = c.dim();
    let (values, vectors) = c.spectrum();
    let radius = values.iter().fold(0.0, |m, v| m.max(v.abs()));
    let zero = group_tol(0.0, 0.0, radius);
    let kernel_cols: Vec<usize> = (0..n).filter(|&i| values[i].abs() <= zero).collect();
    let kernel = DMatrix::from_fn(n, kernel_cols.len(), |r, k| vectors[(r, kernel_cols[k])]);
    let exact = range_basis(&c.d);
    let coexact = range_basis(&c.delta);
    let orthogonality_residual = [
        kernel.transpose() * &exact,
        kernel.transpose() * &coexact,
        exact.transpose() * &coexact,
    ]
    .iter()
    .map(max_abs)
    .fold(0.0, f64::max);
    let identity = DMatrix::<f64>::identity(n, n);
    DecompositionReport {
        dim_total: n,
        dim_kernel: kernel.ncols(),
        dim_exact: exact.ncols(),
        dim_coexact: coexact.ncols(),
        orthogonality_residual,
        d_squared: max_abs(&(&c.d * &c.d)),
        delta_squared: max_abs(&(&c.delta * &c.delta)),
        green_residual: max_abs(&(&c.delta - c.d.transpose())),
        t_squared: max_abs(&(&c.t * &c.t - identity)),
        anticommutator: max_abs(&(&c.q * &c.t + &c.t * &c.q)),
        laplacian_split: max_abs(&(&c.p - (&c.d * &c.delta + &c.delta * &c.d))),
    }
}

/// Orthonormal basis of the part of `space` lying in the span of the
/// orthonormal columns of `target` (valid when `space` is invariant under
/// the projection, as eigenspaces of `P` are).
fn intersect(space: &DMatrix<f64>, target: &DMatrix<f64>) -> DMatrix<f64> {
    let projected = target * (target.transpose() * space);
    let n = space.nrows();
    if projected.ncols() == 0 {
        return DMatrix::zeros(n, 0);
    }
    let svd = projected.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] > 0.5)
        .collect();
    DMatrix::from_fn(n, keep.len(), |r, c| u[(r, keep[c])])
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenspaceSplit {
    pub lambda: f64,
    /// Orthonormal columns spanning the eigenspace.
    pub eigenspace: DMatrix<f64>,
    pub exact: DMatrix<f64>,
    pub coexact: DMatrix<f64>,
    /// `max |Cᵀ dᵀ d C - λ I| / λ` on the coexact part.
    pub d_isometry_residual: f64,
    /// Same for `δ` on the exact part.
    pub delta_isometry_residual: f64,
    /// Distance of `d·coexact` from the exact part (and `δ·exact` from the
    /// coexact part), relative to `√λ`.
    pub image_residual: f64,
}

impl EigenspaceSplit {
    pub fn multiplicity(&self) -> usize {
        self.eigenspace.ncols()
    }

    pub fn passed(&self, tol: f64) -> bool {
        self.exact.ncols() == self.coexact.ncols()
            && self.exact.ncols() + self.coexact.ncols() == self.multiplicity()
            && self.d_isometry_residual <= tol
            && self.delta_isometry_residual <= tol
            && self.image_residual <= tol
    }
}

fn isometry_residual(op: &DMatrix<f64>, basis: &DMatrix<f64>, lambda: f64) -> f64 {
    if basis.ncols() == 0 {
        return 0.0;
    }
    let image = op * basis;
    let gram = image.transpose() * &image;
    max_abs(&(gram - DMatrix::identity(basis.ncols(), basis.ncols()) * lambda)) / lambda
}

fn image_residual(op: &DMatrix<f64>, from: &DMatrix<f64>, onto: &DMatrix<f64>, lambda: f64) -> f64 {
    if from.ncols() == 0 {
        return 0.0;
    }
    let image = op * from;
    let outside = &image - onto * (onto.transpose() * &image);
    max_abs(&outside) / lambda.sqrt()
}

/// Splits the `λ`-eigenspace of `P` into exact and coexact parts and checks
/// that `d` and `δ` exchange them isometrically up to `√λ`.
pub fn verify_eigenspace_pairing(complex: &DiracComplexMatrix, lambda: f64) -> Result<EigenspaceSplit> {
    let (values, vectors) = complex.spectrum();
    let radius = values.iter().fold(0.0, |m, v| m.max(v.abs()));
    if !(lambda.is_finite() && lambda > group_tol(0.0, 0.0, radius)) {
        return Err(Error::InvalidInput(format!("pairing needs lambda > 0, got {lambda}")));
    }
    let cols: Vec<usize> = (0..values.len())
        .filter(|&i| (values[i] - lambda).abs() <= group_tol(values[i], lambda, radius))
        .collect();
    if cols.is_empty() {
        return Err(Error::NotInSpectrum(lambda));
    }
    let n = complex.dim();
    let eigenspace = DMatrix::from_fn(n, cols.len(), |r, c| vectors[(r, cols[c])]);
    let exact = intersect(&eigenspace, &range_basis(&complex.d));
    let coexact = intersect(&eigenspace, &range_basis(&complex.delta));
    let d_isometry_residual = isometry_residual(&complex.d, &coexact, lambda);
    let delta_isometry_residual = isometry_residual(&complex.delta, &exact, lambda);
    let image = image_residual(&complex.d, &coexact, &exact, lambda)
        .max(image_residual(&complex.delta, &exact, &coexact, lambda));
    Ok(EigenspaceSplit {
        lambda,
        eigenspace,
        exact,
        coexact,
        d_isometry_residual,
        delta_isometry_residual,
        image_residual: image,
    })
}

/// Eigenvalues of `P` compressed to the span of `basis`, ascending, with
/// eigenvectors in ambient coordinates.
fn restricted_spectrum(p: &DMatrix<f64>, basis: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    if basis.ncols() == 0 {
        return (Vec::new(), DMatrix::zeros(basis.nrows(), 0));
    }
    let (values, vectors) = sorted_eigen(&(basis.transpose() * p * basis));
    (values, basis * vectors)
}

/// Positive eigenvalues of `P` on exact sections, ascending with multiplicity.
pub fn exact_spectrum(complex: &DiracComplexMatrix) -> Vec<f64> {
    restricted_spectrum(&complex.p, &range_basis(&complex.d)).0
}

/// Positive eigenvalues of `P` on coexact sections.
pub fn coexact_spectrum(complex: &DiracComplexMatrix) -> Vec<f64> {
    restricted_spectrum(&complex.p, &range_basis(&complex.delta)).0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxFacets {
    /// `λ_i` on exact sections.
    pub exact_eigenvalue: f64,
    /// `λ_i` on coexact sections.
    pub coexact_eigenvalue: f64,
    /// `sup_{η ∈ L} ‖η‖² / min{‖x‖² : dx = η}` for `L` spanned by the
    /// first `i` exact eigenvectors.
    pub sup_quotient: f64,
}

impl MinimaxFacets {
    pub fn pairing_residual(&self) -> f64 {
        (self.exact_eigenvalue - self.coexact_eigenvalue).abs() / self.exact_eigenvalue
    }

    pub fn quotient_residual(&self) -> f64 {
        (self.sup_quotient - self.exact_eigenvalue).abs() / self.exact_eigenvalue
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinimaxReport {
    pub i: usize,
    /// `None` when the complex has fewer than `i` exact eigenvalues.
    pub facets: Option<MinimaxFacets>,
}

impl MinimaxReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.facets
            .is_none_or(|f| f.pairing_residual() <= tol && f.quotient_residual() <= tol)
    }
}

/// Checks the `i`-th (1-based) exact/coexact eigenvalue pairing and the
/// sup-quotient on the span of the first `i` exact eigenvectors.
pub fn verify_minimax(complex: &DiracComplexMatrix, i: usize) -> Result<MinimaxReport> {
    if i == 0 {
        return Err(Error::InvalidInput("minimax index is 1-based".into()));
    }
    let exact_basis = range_basis(&complex.d);
    let (exact, exact_vectors) = restricted_spectrum(&complex.p, &exact_basis);
    let (coexact, _) = restricted_spectrum(&complex.p, &range_basis(&complex.delta));
    if i > exact.len() || i > coexact.len() {
        return Ok(MinimaxReport { i, facets: None });
    }
    // (d dᵀ)⁺ = Σ u uᵀ / σ² over the nonzero eigenpairs of d dᵀ
    let (sigma2, u) = gram_range(&complex.d);
    let n = complex.dim();
    let mut pinv = DMatrix::zeros(n, n);
    for (k, &s2) in sigma2.iter().enumerate() {
        let col = u.column(k);
        pinv += (col * col.transpose()) / s2;
    }
    let l = exact_vectors.columns(0, i).into_owned();
    let compressed = l.transpose() * pinv * &l;
    let (values, _) = sorted_eigen(&compressed);
    Ok(MinimaxReport {
        i,
        facets: Some(MinimaxFacets {
            exact_eigenvalue: exact[i - 1],
            coexact_eigenvalue: coexact[i - 1],
            sup_quotient: 1.0 / values[0],
        }),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplicityRow {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub exact: usize,
    pub coexact: usize,
    /// Dimension of the kernel part (nonzero only for the zero eigenvalue).
    pub harmonic: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityReport {
    pub rows: Vec<MultiplicityRow>,
    pub kernel_dim: usize,
    /// Zero has multiplicity `kernel_dim` and no exact/coexact part; every
    /// positive multiplicity is `exact + coexact` with `exact = coexact`.
    pub consistent: bool,
}

/// Per-eigenvalue bookkeeping of harmonic, exact and coexact dimensions.
pub fn verify_multiplicities(complex: &DiracComplexMatrix) -> MultiplicityReport {
    let (values, vectors) = complex.spectrum();
    let radius = values.iter().fold(0.0, |m, v| m.max(v.abs()));
    let exact_basis = range_basis(&complex.d);
    let coexact_basis = range_basis(&complex.delta);
    let kernel_dim = complex.dim() - exact_basis.ncols() - coexact_basis.ncols();
    let zero = group_tol(0.0, 0.0, radius);
    let n = complex.dim();
    let mut rows = Vec::new();
    let mut consistent = true;
    for (start, len) in group_runs(&values, radius) {
        let space = DMatrix::from_fn(n, len, |r, c| vectors[(r, start + c)]);
        let eigenvalue = values[start..start + len].iter().sum::<f64>() / len as f64;
        let exact = intersect(&space, &exact_basis).ncols();
        let coexact = intersect(&space, &coexact_basis).ncols();
        let is_zero = eigenvalue.abs() <= zero;
        let harmonic = if is_zero { len - exact - coexact } else { 0 };
        consistent &= if is_zero {
            exact == 0 && coexact == 0 && len == kernel_dim
        } else {
            exact == coexact && exact + coexact == len
        };
        rows.push(MultiplicityRow {
            eigenvalue,
            multiplicity: len,
            exact,
            coexact,
            harmonic,
        });
    }
    if !rows.iter().any(|r| r.eigenvalue.abs() <= zero) {
        consistent &= kernel_dim == 0;
    }
    MultiplicityReport {
        rows,
        kernel_dim,
        consistent,
    }
}

/// Kernel dimension of `P`.
pub fn harmonic_dimension(complex: &DiracComplexMatrix) -> usize {
    complex.dim() - range_basis(&complex.d).ncols() - range_basis(&complex.delta).ncols()
}

/// Smallest positive eigenvalue of `P` on exact sections.
pub fn smallest_exact_eigenvalue(complex: &DiracComplexMatrix) -> Result<f64> {
    exact_spectrum(complex)
        .first()
        .copied()
        .ok_or_else(|| Error::InvalidInput("complex has no exact sections".into()))
}

/// Dissection bound against the true spectrum on a discretised unit-speed
/// circle of length `2π` covered by two arcs.
#[derive(Debug, Clone, PartialEq)]
pub struct S1CaseReport {
    pub n: usize,
    pub overlap_fraction: f64,
    /// Each overlap component spans `2 * half_width` edges.
    pub half_width: usize,
    pub mu_arcs: [f64; 2],
    pub mu_overlap: f64,
    pub overlap_kernel_dim: usize,
    pub c_rho: f64,
    pub cover: CoverSpec,
    pub bound: BoundResult,
    /// Positive exact eigenvalues of the circle, ascending with multiplicity.
    pub truth_spectrum: Vec<f64>,
    /// `truth_spectrum[N - 1]`.
    pub mu_n: f64,
    /// `mu_n - bound.mu_bound`
    pub margin: f64,
}

impl S1CaseReport {
    pub fn passed(&self) -> bool {
        self.bound.mu_bound > 0.0 && self.bound.mu_bound <= self.mu_n && self.n_matches_kernel()
    }

    /// `N1` of the cover equals the kernel dimension of the overlap complex.
    pub fn n_matches_kernel(&self) -> bool {
        self.bound.n.n1 == self.overlap_kernel_dim as u64 && self.bound.n.n == self.bound.n.n1 + self.bound.n.n2 + 1
    }
}

fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

/// Two arcs `[-w, n/2 + w]` and `[n/2 - w, n + w]` (node indices mod `n`)
/// with `w = round(overlap_fraction * n / 2)`; the overlap has two interval
/// components of `2w` edges each.
pub fn s1_case_study(n: usize, overlap_fraction: f64) -> Result<S1CaseReport> {
    if n < 32 || !n.is_multiple_of(2) {
        return Err(Error::InvalidInput(format!("n = {n} must be even and >= 32")));
    }
    if !(overlap_fraction > 0.0 && overlap_fraction < 0.5) {
        return Err(Error::InvalidInput(format!(
            "overlap fraction {overlap_fraction} must lie in (0, 1/2)"
        )));
    }
    let w = (overlap_fraction * n as f64 / 2.0).round() as usize;
    if w < 2 || 4 * w >= n {
        return Err(Error::InvalidInput(format!(
            "overlap half-width {w} nodes is degenerate for n = {n}"
        )));
    }
    let length = 2.0 * PI;
    let step = length / n as f64;
    let half = n / 2;

    let circle = build_circle_complex(n, length)?;
    let arc_edges = half + 2 * w;
    let arc = build_interval_complex(arc_edges + 1, arc_edges as f64 * step, BoundaryKind::Absolute)?;
    let piece = build_interval_complex(2 * w + 1, 2.0 * w as f64 * step, BoundaryKind::Absolute)?;
    let overlap = piece.direct_sum(&piece);

    // both arcs are congruent
    let mu_arc = smallest_exact_eigenvalue(&arc)?;
    let mu_overlap = smallest_exact_eigenvalue(&overlap)?;
    let overlap_kernel_dim = harmonic_dimension(&overlap);

    let rho0: Vec<f64> = (0..n)
        .map(|p| {
            // offset from node 0 in [-w, n - w)
            let x = if p + w >= n { p as f64 - n as f64 } else { p as f64 };
            let (w, h) = (w as f64, half as f64);
            if x <= -w || x >= h + w {
                0.0
            } else if x < w {
                smoothstep((x + w) / (2.0 * w))
            } else if x > h - w {
                smoothstep((h + w - x) / (2.0 * w))
            } else {
                1.0
            }
        })
        .collect();
    let rho1: Vec<f64> = rho0.iter().map(|r| 1.0 - r).collect();
    let c_rho = c_rho_from_samples(&[rho0, rho1], step, true)?;

    let cover = CoverSpec::new(
        alloc::vec![mu_arc, mu_arc],
        alloc::vec![alloc::vec![1], alloc::vec![0]],
        [((0, 1), mu_overlap)],
        c_rho,
    )?
    .with_h_pair([((0, 1), overlap_kernel_dim as u64)])?;
    let bound = laplacian_bound(&cover, NConvention::Unordered)?;
    let truth_spectrum = exact_spectrum(&circle);
    let index = bound.n.n as usize;
    let mu_n = *truth_spectrum
        .get(index - 1)
        .ok_or(Error::IndexOutOfRange {
            index,
            len: truth_spectrum.len(),
        })?;
    Ok(S1CaseReport {
        n,
        overlap_fraction,
        half_width: w,
        mu_arcs: [mu_arc, mu_arc],
        mu_overlap,
        overlap_kernel_dim,
        c_rho,
        margin: mu_n - bound.mu_bound,
        cover,
        bound,
        truth_spectrum,
        mu_n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_spectrum_closed_form() {
        let c = build_circle_complex(8, 2.0 * PI).unwrap();
        let (values, _) = c.spectrum();
        let step = PI / 4.0;
        let mut exact: Vec<f64> = (0..8)
            .flat_map(|k| {
                let v = 4.0 * (PI * k as f64 / 8.0).sin().powi(2) / (step * step);
                [v, v]
            })
            .collect();
        exact.sort_by(f64::total_cmp);
        for (a, b) in values.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn circle_decomposition_dims() {
        let r = verify_decomposition(&build_circle_complex(8, 2.0 * PI).unwrap());
        assert_eq!((r.dim_kernel, r.dim_exact, r.dim_coexact), (2, 7, 7));
        assert!(r.passed(1e-12), "{r:?}");
    }

    #[test]
    fn interval_kernels() {
        let a = build_interval_complex(10, 1.0, BoundaryKind::Absolute).unwrap();
        let r = verify_decomposition(&a);
        assert_eq!(r.dim_kernel, 1);
        assert!(r.passed(1e-12));
        // function grade is the Neumann Laplacian: kernel = constants
        let (values, vectors) = a.spectrum();
        assert!(values[0].abs() < 1e-10);
        let v0 = vectors.column(0);
        for i in 1..10 {
            assert!((v0[i] - v0[0]).abs() < 1e-12);
        }
        let rel = build_interval_complex(10, 1.0, BoundaryKind::Relative).unwrap();
        let r = verify_decomposition(&rel);
        assert_eq!(r.dim_kernel, 1);
        assert_eq!(rel.dim_plus(), 8);
        // Dirichlet function grade: no zero eigenvalue
        let f = rel.derivative().transpose() * rel.derivative();
        let (fv, _) = sorted_eigen(&f);
        assert!(fv[0] > 1.0);
    }

    #[test]
    fn pairing_on_circle() {
        let c = build_circle_complex(16, 2.0 * PI).unwrap();
        let step = 2.0 * PI / 16.0;
        let lambda = 4.0 * (PI / 16.0).sin().powi(2) / (step * step);
        let s = verify_eigenspace_pairing(&c, lambda).unwrap();
        assert_eq!(s.multiplicity(), 4);
        assert_eq!((s.exact.ncols(), s.coexact.ncols()), (2, 2));
        assert!(s.passed(1e-10), "{s:?}");
        assert!(verify_eigenspace_pairing(&c, 0.0).is_err());
        assert_eq!(verify_eigenspace_pairing(&c, 0.123).unwrap_err(), Error::NotInSpectrum(0.123));
    }

    #[test]
    fn minimax_facets() {
        let c = build_circle_complex(16, 2.0 * PI).unwrap();
        let step = 2.0 * PI / 16.0;
        let first = 4.0 * (PI / 16.0).sin().powi(2) / (step * step);
        for i in 1..=4 {
            let r = verify_minimax(&c, i).unwrap();
            assert!(r.passed(1e-10), "{r:?}");
            if i == 1 {
                assert!((r.facets.unwrap().exact_eigenvalue - first).abs() < 1e-12);
            }
        }
        let tiny = build_interval_complex(4, 1.0, BoundaryKind::Absolute).unwrap();
        assert!(verify_minimax(&tiny, 10).unwrap().facets.is_none());
        assert!(verify_minimax(&c, 0).is_err());
    }

    #[test]
    fn multiplicities() {
        for c in [
            build_circle_complex(12, 3.0).unwrap(),
            build_interval_complex(12, 3.0, BoundaryKind::Absolute).unwrap(),
            build_interval_complex(12, 3.0, BoundaryKind::Relative).unwrap(),
        ] {
            let r = verify_multiplicities(&c);
            assert!(r.consistent, "{r:?}");
        }
    }

    #[test]
    fn case_study_bound_holds() {
        let r = s1_case_study(64, 0.25).unwrap();
        assert_eq!(r.overlap_kernel_dim, 2);
        assert_eq!(r.bound.n.n, 3);
        assert!(r.passed(), "{r:?}");
        assert!(s1_case_study(64, 0.01).is_err());
        assert!(s1_case_study(30, 0.25).is_err());
    }
}
