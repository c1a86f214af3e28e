//! Absolute-boundary spectrum of a truncated tube, mode by mode.
//!
//! Each lattice mode `(r, s)` separates into a scalar problem
//! `-a'' + κ_(r,s)(u) a = λ a` on `[r0, R0]`, either with the Robin
//! condition `a' = (log fh)' a` at both ends ([`Family::Abs1`]) or with
//! Dirichlet conditions ([`Family::Abs2`]).

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use crate::geometry::{DegenerationSchedule, TubeGeometry};
use crate::sturm_liouville::{
    self, count_below, eigenvalue_by_index, fd_eigenvalues_by_index, BoundaryCondition, Method,
    Potential, SlProblem, SpectrumResult, Window,
};
use crate::torus_modes::{
    self, certify_window, enumerate_modes, kappa_infimum, kappa_tail_bound, kappa_unchecked,
    ModeIndex, TruncationCertificate, U_GRID_SPACING,
};
use crate::{Error, Result};

/// Spacing of the candidate grid for `r0`.
pub const R0_GRID_SPACING: f64 = 0.1;

/// Default fibre-eigenvalue threshold used to place `r0`.
pub const DEFAULT_R0_THRESHOLD: f64 = 5.0;

/// Default finite-difference resolution for mode problems.
pub const DEFAULT_GRID_N: usize = 1000;

/// Slack allowed on the `λ ≥ 1` check.
pub const THRESHOLD_TOL: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Robin with `β = (log fh)'` at both ends.
    Abs1,
    /// Dirichlet at both ends.
    Abs2,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Abs1 => "abs1",
            Family::Abs2 => "abs2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FamilySelection {
    Abs1,
    Abs2,
    Both,
}

impl FamilySelection {
    pub fn families(&self) -> &'static [Family] {
        match self {
            FamilySelection::Abs1 => &[Family::Abs1],
            FamilySelection::Abs2 => &[Family::Abs2],
            FamilySelection::Both => &[Family::Abs1, Family::Abs2],
        }
    }
}

/// `q = κ_mode` on a fixed geometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModePotential {
    pub mode: ModeIndex,
    pub geometry: TubeGeometry,
}

impl Potential for ModePotential {
    fn eval(&self, u: f64) -> f64 {
        kappa_unchecked(self.mode, u, &self.geometry)
    }
}

pub fn assemble_mode_problem(
    mode: ModeIndex,
    geometry: &TubeGeometry,
    family: Family,
) -> Result<SlProblem<ModePotential>> {
    let (r0, r_outer) = geometry.interval()?;
    let (left, right) = match family {
        Family::Abs1 => {
            let p = geometry.profile();
            (
                BoundaryCondition::robin(p.robin_beta(r0)),
                BoundaryCondition::robin(p.robin_beta(r_outer)),
            )
        }
        Family::Abs2 => (BoundaryCondition::Dirichlet, BoundaryCondition::Dirichlet),
    };
    SlProblem::new(
        ModePotential {
            mode,
            geometry: *geometry,
        },
        r0,
        r_outer,
        left,
        right,
    )
}

/// Boundary shift `C(β)` of a family; the same for every mode.
fn family_shift(geometry: &TubeGeometry, family: Family) -> Result<f64> {
    Ok(assemble_mode_problem(ModeIndex::ZERO, geometry, family)?.boundary_shift())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeSpectrumRequest {
    pub geometry: TubeGeometry,
    /// Eigenvalues in `(0, lambda_max]` are reported.
    pub lambda_max: f64,
    pub include_zero_mode: bool,
    pub family: FamilySelection,
    pub grid_n: usize,
}

impl TubeSpectrumRequest {
    pub fn new(geometry: TubeGeometry, lambda_max: f64, family: FamilySelection) -> Result<Self> {
        if !(lambda_max.is_finite() && lambda_max > 0.0) {
            return Err(Error::InvalidInput(format!("lambda_max = {lambda_max} must be > 0")));
        }
        geometry.inner()?;
        Ok(Self {
            geometry,
            lambda_max,
            include_zero_mode: false,
            family,
            grid_n: DEFAULT_GRID_N,
        })
    }

    pub fn with_zero_mode(mut self, include: bool) -> Self {
        self.include_zero_mode = include;
        self
    }

    pub fn with_grid_n(mut self, grid_n: usize) -> Self {
        self.grid_n = grid_n;
        self
    }
}

/// One cross-validated eigenvalue of a mode problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeEntry {
    pub mode: ModeIndex,
    pub family: Family,
    /// Shooting value.
    pub eigenvalue: f64,
    pub error_estimate: f64,
    pub fd_eigenvalue: f64,
    /// Finite differences and shooting agree within their error estimates.
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeSpectrum {
    /// Sorted by eigenvalue, then mode, then family.
    pub entries: Vec<TubeEntry>,
    /// Smallest positive eigenvalue over all off-zero modes and the requested
    /// families, wherever it lies.
    pub min_positive_offzero: TubeEntry,
    pub truncation_certificate: TruncationCertificate,
}

impl TubeSpectrum {
    /// Every off-zero eigenvalue, in the window or not, is at least
    /// `threshold - THRESHOLD_TOL` and both solvers agree on it.
    pub fn passes_threshold(&self, threshold: f64) -> bool {
        let floor = threshold - THRESHOLD_TOL;
        let m = &self.min_positive_offzero;
        m.agree
            && m.eigenvalue >= floor
            && self
                .entries
                .iter()
                .filter(|e| !e.mode.is_zero())
                .all(|e| e.agree && e.eigenvalue >= floor)
    }
}

fn entries_from(mode: ModeIndex, family: Family, r: &sturm_liouville::CrossValidation) -> Vec<TubeEntry> {
    r.combined
        .eigenvalues
        .iter()
        .zip(&r.combined.error_estimates)
        .zip(&r.fd.eigenvalues)
        .map(|((&eigenvalue, &error_estimate), &fd)| TubeEntry {
            mode,
            family,
            eigenvalue,
            error_estimate,
            fd_eigenvalue: fd,
            agree: r.agree,
        })
        .collect()
}

fn sort_entries(entries: &mut [TubeEntry]) {
    entries.sort_by(|a, b| {
        a.eigenvalue
            .total_cmp(&b.eigenvalue)
            .then(a.mode.cmp(&b.mode))
            .then(a.family.cmp(&b.family))
    });
}

/// Smallest eigenvalue `> 0` of one mode problem, by both solvers.
fn lowest_positive(
    mode: ModeIndex,
    geometry: &TubeGeometry,
    family: Family,
    grid_n: usize,
) -> Result<TubeEntry> {
    let problem = assemble_mode_problem(mode, geometry, family)?;
    let k = count_below(&problem, 0.0)?;
    let (value, err) = eigenvalue_by_index(&problem, k)?;
    let shooting = SpectrumResult {
        eigenvalues: alloc::vec![value],
        error_estimates: alloc::vec![err],
        first_index: k,
        method: Method::Shooting,
        grid_n: 0,
    };
    let fd = fd_eigenvalues_by_index(&problem, grid_n, &[k])?;
    let cv = sturm_liouville::combine(fd, shooting);
    Ok(entries_from(mode, family, &cv)[0])
}

/// Lowest positive off-zero eigenvalue, searching modes in order of their
/// lower bound `max(0, inf κ - C)` and growing the lattice until no mode
/// outside it can undercut the result.
fn min_positive_offzero(request: &TubeSpectrumRequest, start: TruncationCertificate) -> Result<TubeEntry> {
    let geometry = &request.geometry;
    let families = request.family.families();
    let shifts: Vec<f64> = families
        .iter()
        .map(|&f| family_shift(geometry, f))
        .collect::<Result<_>>()?;
    let max_shift = shifts.iter().copied().fold(0.0, f64::max);
    let mut certificate = start;
    let mut best: Option<TubeEntry> = None;
    let mut done: Vec<(ModeIndex, Family)> = Vec::new();
    loop {
        let mut candidates = Vec::new();
        for mode in enumerate_modes(certificate.m_max) {
            if mode.is_zero() {
                continue;
            }
            let inf = kappa_infimum(mode, geometry)?;
            for (&family, &shift) in families.iter().zip(&shifts) {
                candidates.push(((inf - shift).max(0.0), mode, family));
            }
        }
        candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        for (bound, mode, family) in candidates {
            if best.is_some_and(|b| bound >= b.eigenvalue) {
                break;
            }
            if done.contains(&(mode, family)) {
                continue;
            }
            let e = lowest_positive(mode, geometry, family, request.grid_n)?;
            done.push((mode, family));
            if best.is_none_or(|b| e.eigenvalue < b.eigenvalue) {
                best = Some(e);
            }
        }
        let best = best.ok_or_else(|| Error::InvalidInput("no off-zero modes".into()))?;
        if certificate.boundary_kappa_min - max_shift > best.eigenvalue {
            return Ok(best);
        }
        certificate = certify_window(geometry, best.eigenvalue + max_shift)?;
    }
}

/// Merged spectra of all modes that can reach `(0, λ_max]`.
pub fn tube_absolute_spectrum(request: &TubeSpectrumRequest) -> Result<TubeSpectrum> {
    let geometry = &request.geometry;
    let families = request.family.families();
    let window = Window::new(0.0, request.lambda_max)?;
    let mut max_shift: f64 = 0.0;
    let mut shifts = Vec::new();
    for &f in families {
        let s = family_shift(geometry, f)?;
        max_shift = max_shift.max(s);
        shifts.push(s);
    }
    let certificate = certify_window(geometry, request.lambda_max + max_shift)?;
    let mut entries = Vec::new();
    for mode in enumerate_modes(certificate.m_max) {
        if mode.is_zero() && !request.include_zero_mode {
            continue;
        }
        let inf = kappa_infimum(mode, geometry)?;
        for (&family, &shift) in families.iter().zip(&shifts) {
            if inf - shift > request.lambda_max {
                continue;
            }
            let problem = assemble_mode_problem(mode, geometry, family)?;
            let cv = sturm_liouville::cross_validate(&problem, request.grid_n, window)?;
            entries.extend(entries_from(mode, family, &cv));
        }
    }
    sort_entries(&mut entries);
    let min_positive_offzero = min_positive_offzero(request, certificate)?;
    Ok(TubeSpectrum {
        entries,
        min_positive_offzero,
        truncation_certificate: certificate,
    })
}

/// Inner truncation chosen by [`find_r0`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct R0Choice {
    pub r0: f64,
    /// `inf` of off-zero `κ` over `[r0, R0]`; exceeds the threshold.
    pub achieved_inf: f64,
    pub mode: ModeIndex,
    pub m_max: u32,
}

/// Certified minimum of off-zero `κ(u)` over all modes: `(value, mode)`.
fn offzero_min_at(geometry: &TubeGeometry, u: f64, modes: &[ModeIndex], m_max: u32) -> Option<(f64, ModeIndex)> {
    let mut best = (f64::INFINITY, ModeIndex::ZERO);
    for &m in modes {
        let k = kappa_unchecked(m, u, geometry);
        if k < best.0 {
            best = (k, m);
        }
    }
    (kappa_tail_bound(geometry, m_max, u) >= best.0).then_some(best)
}

/// Smallest `r0` on the `0.1`-grid below `R0` such that every off-zero
/// `κ` exceeds `threshold` on `[r0, R0]`.
///
/// The infimum is taken on a `1e-3` grid of `[0, R0]` aligned with the
/// candidates, with the lattice grown until its tail bound certifies the
/// per-point minimum.
pub fn find_r0(geometry: &TubeGeometry, threshold: f64) -> Result<R0Choice> {
    if !threshold.is_finite() {
        return Err(Error::InvalidInput(format!("threshold = {threshold}")));
    }
    let r_outer = geometry.outer();
    let per_candidate = (R0_GRID_SPACING / U_GRID_SPACING).round() as usize;
    let fine_steps = (r_outer / U_GRID_SPACING).floor() as usize;
    let mut grid: Vec<f64> = (0..=fine_steps).map(|i| i as f64 * U_GRID_SPACING).collect();
    if grid.last().is_some_and(|&u| u < r_outer) {
        grid.push(r_outer);
    }
    let mut m_max = 1u32;
    let profile: Vec<(f64, ModeIndex)> = 'lattice: loop {
        let modes: Vec<ModeIndex> = enumerate_modes(m_max).into_iter().filter(|m| !m.is_zero()).collect();
        let mut values = Vec::with_capacity(grid.len());
        for &u in &grid {
            match offzero_min_at(geometry, u, &modes, m_max) {
                Some(v) => values.push(v),
                None if m_max < torus_modes::MAX_LATTICE => {
                    m_max *= 2;
                    continue 'lattice;
                }
                None => {
                    return Err(Error::Truncation {
                        m_max,
                        tail_bound: kappa_tail_bound(geometry, m_max, u),
                        target: threshold,
                    })
                }
            }
        }
        break values;
    };
    // suffix minima
    let mut suffix = profile.clone();
    for i in (0..suffix.len() - 1).rev() {
        if suffix[i + 1].0 < suffix[i].0 {
            suffix[i] = suffix[i + 1];
        }
    }
    let mut best = f64::NEG_INFINITY;
    let mut j = 0;
    while j * per_candidate < grid.len() {
        let i = j * per_candidate;
        let r0 = grid[i];
        if r0 >= r_outer {
            break;
        }
        let (value, mode) = suffix[i];
        if value > threshold {
            return Ok(R0Choice {
                r0,
                achieved_inf: value,
                mode,
                m_max,
            });
        }
        best = best.max(value);
        j += 1;
    }
    Err(Error::ThresholdUnreachable {
        threshold,
        r_outer,
        best,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepOptions {
    pub lambda_max: f64,
    pub r0_threshold: f64,
    pub family: FamilySelection,
    pub include_zero_mode: bool,
    pub grid_n: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            lambda_max: 2.0,
            r0_threshold: DEFAULT_R0_THRESHOLD,
            family: FamilySelection::Both,
            include_zero_mode: false,
            grid_n: DEFAULT_GRID_N,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSuccess {
    pub geometry: TubeGeometry,
    pub r0: R0Choice,
    pub spectrum: TubeSpectrum,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub radius: f64,
    pub outcome: core::result::Result<SweepSuccess, String>,
}

/// One row per `R` of the schedule, in grid order; failures are kept as
/// rows with their reason.
pub fn sweep(schedule: &DegenerationSchedule, options: &SweepOptions) -> Vec<SweepRow> {
    (0..schedule.r_grid().len())
        .map(|j| SweepRow {
            radius: schedule.r_grid()[j],
            outcome: sweep_one(schedule, j, options).map_err(|e| format!("{e}")),
        })
        .collect()
}

fn sweep_one(schedule: &DegenerationSchedule, j: usize, options: &SweepOptions) -> Result<SweepSuccess> {
    let open = schedule.instantiate(j)?;
    let r0 = find_r0(&open, options.r0_threshold)?;
    let geometry = open.with_inner(r0.r0)?;
    let request = TubeSpectrumRequest::new(geometry, options.lambda_max, options.family)?
        .with_zero_mode(options.include_zero_mode)
        .with_grid_n(options.grid_n);
    let spectrum = tube_absolute_spectrum(&request)?;
    Ok(SweepSuccess {
        geometry,
        r0,
        spectrum,
    })
}
