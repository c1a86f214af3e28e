//! Lower bounds for the `N`-th positive eigenvalue from a cover.
//!
//! For sets `U_0..U_K`, neighbours `j ~ i`, overlap eigenvalues `μ_ij` and
//! partition-of-unity constant `C_ρ`:
//!
//! ```text
//! μ_N ≥ 1 / Σ_i [ 1/μ_i + 4 Σ_{j~i} (C_ρ/μ_ij + 1)(1/μ_i + 1/μ_j) ]
//! ```
//!
//! The Dirac form takes eigenvalues `λ` with `λ² = μ` and returns the square
//! root of the same quantity.

use alloc::collections::{BTreeMap, BinaryHeap};
use alloc::format;
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Normalised unordered pair `(min, max)`.
pub fn pair_key(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

/// Sorted triple.
pub fn triple_key(i: usize, j: usize, k: usize) -> (usize, usize, usize) {
    let mut t = [i, j, k];
    t.sort_unstable();
    (t[0], t[1], t[2])
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoverSpec {
    mu_set: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
    mu_pair: BTreeMap<(usize, usize), f64>,
    c_rho: f64,
    h_pair: BTreeMap<(usize, usize), u64>,
    h_triple: BTreeMap<(usize, usize, usize), u64>,
    h_set: Option<Vec<u64>>,
}

fn cover_err(msg: alloc::string::String) -> Error {
    Error::InvalidCover(msg)
}

impl CoverSpec {
    /// Validated cover without harmonic data (all `h = 0`).
    ///
    /// `mu_pair` keys may be given in either order.
    pub fn new(
        mu_set: Vec<f64>,
        adjacency: Vec<Vec<usize>>,
        mu_pair: impl IntoIterator<Item = ((usize, usize), f64)>,
        c_rho: f64,
    ) -> Result<Self> {
        let n = mu_set.len();
        if n == 0 {
            return Err(cover_err("cover needs at least one set".into()));
        }
        if adjacency.len() != n {
            return Err(cover_err(format!("adjacency has {} rows for {n} sets", adjacency.len())));
        }
        for (i, mu) in mu_set.iter().enumerate() {
            if !(mu.is_finite() && *mu > 0.0) {
                return Err(cover_err(format!("mu_set[{i}] = {mu} must be > 0")));
            }
        }
        if !(c_rho.is_finite() && c_rho >= 0.0) {
            return Err(cover_err(format!("C_rho = {c_rho} must be >= 0")));
        }
        for (i, row) in adjacency.iter().enumerate() {
            for (pos, &j) in row.iter().enumerate() {
                if j >= n || j == i {
                    return Err(cover_err(format!("adjacency[{i}] has invalid neighbour {j}")));
                }
                if row[..pos].contains(&j) {
                    return Err(cover_err(format!("adjacency[{i}] lists {j} twice")));
                }
                if !adjacency[j].contains(&i) {
                    return Err(cover_err(format!("adjacency not symmetric: {i} -> {j}")));
                }
            }
        }
        let mut pairs = BTreeMap::new();
        for ((i, j), mu) in mu_pair {
            let key = pair_key(i, j);
            if key.1 >= n || !adjacency[key.0].contains(&key.1) {
                return Err(cover_err(format!("mu_pair {}-{} is not an adjacent pair", key.0, key.1)));
            }
            if !(mu.is_finite() && mu > 0.0) {
                return Err(cover_err(format!("mu_pair {}-{} = {mu} must be > 0", key.0, key.1)));
            }
            if pairs.insert(key, mu).is_some() {
                return Err(cover_err(format!("mu_pair {}-{} given twice", key.0, key.1)));
            }
        }
        for (i, row) in adjacency.iter().enumerate() {
            for &j in row {
                if !pairs.contains_key(&pair_key(i, j)) {
                    return Err(cover_err(format!("missing mu_pair for {}-{}", i.min(j), i.max(j))));
                }
            }
        }
        Ok(Self {
            mu_set,
            adjacency,
            mu_pair: pairs,
            c_rho,
            h_pair: BTreeMap::new(),
            h_triple: BTreeMap::new(),
            h_set: None,
        })
    }

    /// Harmonic dimensions of pairwise intersections.
    pub fn with_h_pair(mut self, h: impl IntoIterator<Item = ((usize, usize), u64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((i, j), d) in h {
            let key = pair_key(i, j);
            if !self.mu_pair.contains_key(&key) {
                return Err(cover_err(format!("h_pair {}-{} is not an adjacent pair", key.0, key.1)));
            }
            if map.insert(key, d).is_some() {
                return Err(cover_err(format!("h_pair {}-{} given twice", key.0, key.1)));
            }
        }
        self.h_pair = map;
        Ok(self)
    }

    /// Harmonic dimensions of triple intersections; indices must be
    /// distinct and pairwise adjacent.
    pub fn with_h_triple(mut self, h: impl IntoIterator<Item = ((usize, usize, usize), u64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for ((i, j, k), d) in h {
            let key = triple_key(i, j, k);
            let (a, b, c) = key;
            let adjacent = a != b
                && b != c
                && [(a, b), (a, c), (b, c)].iter().all(|p| self.mu_pair.contains_key(p));
            if !adjacent {
                return Err(cover_err(format!("h_triple {a}-{b}-{c} is not a triple of adjacent sets")));
            }
            if map.insert(key, d).is_some() {
                return Err(cover_err(format!("h_triple {a}-{b}-{c} given twice")));
            }
        }
        self.h_triple = map;
        Ok(self)
    }

    /// Harmonic dimensions of the sets themselves (only the literal
    /// `N` convention uses them).
    pub fn with_h_set(mut self, h: Vec<u64>) -> Result<Self> {
        if h.len() != self.mu_set.len() {
            return Err(cover_err(format!("h_set has {} entries for {} sets", h.len(), self.mu_set.len())));
        }
        self.h_set = Some(h);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.mu_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu_set.is_empty()
    }

    pub fn mu_set(&self) -> &[f64] {
        &self.mu_set
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn mu_pair(&self, i: usize, j: usize) -> Option<f64> {
        self.mu_pair.get(&pair_key(i, j)).copied()
    }

    pub fn mu_pairs(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.mu_pair
    }

    pub fn c_rho(&self) -> f64 {
        self.c_rho
    }

    pub fn h_pairs(&self) -> &BTreeMap<(usize, usize), u64> {
        &self.h_pair
    }

    pub fn h_triples(&self) -> &BTreeMap<(usize, usize, usize), u64> {
        &self.h_triple
    }

    pub fn h_set(&self) -> Option<&[u64]> {
        self.h_set.as_deref()
    }

    /// Same cover with every eigenvalue squared.
    fn squared(&self) -> Self {
        Self {
            mu_set: self.mu_set.iter().map(|x| x * x).collect(),
            mu_pair: self.mu_pair.iter().map(|(k, x)| (*k, x * x)).collect(),
            ..self.clone()
        }
    }
}

/// Index convention for the harmonic counts `N1`, `N2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NConvention {
    /// Unordered pairs `i < j` and triples of distinct indices.
    #[default]
    Unordered,
    /// Ordered index tuples including repeats; `U_{i,i} = U_i` etc.
    Literal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NCount {
    pub n1: u64,
    pub n2: u64,
    /// `N1 + N2 + 1`
    pub n: u64,
}

pub fn compute_n(cover: &CoverSpec, convention: NConvention) -> Result<NCount> {
    let pairs: u64 = cover.h_pair.values().sum();
    let triples: u64 = cover.h_triple.values().sum();
    let (n1, n2) = match convention {
        NConvention::Unordered => (pairs, triples),
        NConvention::Literal => {
            let sets: u64 = cover
                .h_set
                .as_ref()
                .ok_or_else(|| cover_err("the literal N convention needs h_set".into()))?
                .iter()
                .sum();
            (sets + 2 * pairs, sets + 6 * pairs + 6 * triples)
        }
    };
    Ok(NCount { n1, n2, n: n1 + n2 + 1 })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// Lower bound for the `N`-th positive Laplace-type eigenvalue.
    pub mu_bound: f64,
    /// `sqrt(mu_bound)`, the bound for the Dirac eigenvalue.
    pub lambda_bound: f64,
    pub n: NCount,
    /// Bracketed summand of each set.
    pub per_set_terms: Vec<f64>,
}

pub fn laplacian_bound(cover: &CoverSpec, convention: NConvention) -> Result<BoundResult> {
    let n = compute_n(cover, convention)?;
    let mu = &cover.mu_set;
    let per_set_terms: Vec<f64> = (0..cover.len())
        .map(|i| {
            let inv_i = 1.0 / mu[i];
            let neighbours: f64 = cover.adjacency[i]
                .iter()
                .map(|&j| {
                    let mu_ij = cover.mu_pair[&pair_key(i, j)];
                    (cover.c_rho / mu_ij + 1.0) * (inv_i + 1.0 / mu[j])
                })
                .sum();
            inv_i + 4.0 * neighbours
        })
        .collect();
    let total: f64 = per_set_terms.iter().sum();
    let mu_bound = 1.0 / total;
    if !(mu_bound.is_finite() && mu_bound > 0.0) {
        return Err(cover_err(format!("bound {mu_bound} is not a positive number")));
    }
    Ok(BoundResult {
        mu_bound,
        lambda_bound: mu_bound.sqrt(),
        n,
        per_set_terms,
    })
}

/// Bound from Dirac eigenvalues: the cover's values are read as `λ` and
/// squared before the Laplacian formula is applied.
pub fn dirac_bound(cover: &CoverSpec, convention: NConvention) -> Result<BoundResult> {
    laplacian_bound(&cover.squared(), convention)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Sum(f64, usize, usize);

impl Eq for Sum {}

impl PartialOrd for Sum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Sum {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .total_cmp(&other.0)
            .then(self.1.cmp(&other.1))
            .then(self.2.cmp(&other.2))
    }
}

/// The `count` smallest sums `a + b` (with multiplicity), ascending.
pub fn kunneth_min_sum(a: &[f64], b: &[f64], count: usize) -> Result<Vec<f64>> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidInput("spectra must be nonempty".into()));
    }
    for (name, s) in [("first", a), ("second", b)] {
        if s.iter().any(|x| !x.is_finite()) || s.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidInput(format!("{name} spectrum must be finite and ascending")));
        }
    }
    let count = count.min(a.len().saturating_mul(b.len()));
    let mut out = Vec::with_capacity(count);
    let mut heap = BinaryHeap::new();
    heap.push(Reverse(Sum(a[0] + b[0], 0, 0)));
    while out.len() < count {
        let Some(Reverse(Sum(v, i, j))) = heap.pop() else {
            break;
        };
        out.push(v);
        if j == 0 && i + 1 < a.len() {
            heap.push(Reverse(Sum(a[i + 1] + b[0], i + 1, 0)));
        }
        if j + 1 < b.len() {
            heap.push(Reverse(Sum(a[i] + b[j + 1], i, j + 1)));
        }
    }
    Ok(out)
}

/// Lower bound on `λ₁²` of the unit-volume rescaling of a metric family
/// with volume `a + b t`: `ε (a + b t)^{2/m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct BergerCurve {
    pub t: Vec<f64>,
    pub value: Vec<f64>,
    /// `(Λ, smallest grid t with value ≥ Λ)`.
    pub crossings: Vec<(f64, Option<f64>)>,
    pub strictly_increasing: bool,
}

pub fn berger_scaling(
    a: f64,
    b: f64,
    m: u32,
    epsilon_bound: f64,
    t_grid: &[f64],
    thresholds: &[f64],
) -> Result<BergerCurve> {
    let positive = |x: f64| x.is_finite() && x > 0.0;
    if !(positive(a) && positive(b) && positive(epsilon_bound)) {
        return Err(Error::InvalidInput(format!(
            "a, b and epsilon must be > 0 (got {a}, {b}, {epsilon_bound})"
        )));
    }
    if m < 2 {
        return Err(Error::InvalidInput(format!("dimension m = {m} must be >= 2")));
    }
    if t_grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput("t grid must be finite, >= 0 and strictly increasing".into()));
    }
    if thresholds.iter().any(|x| !x.is_finite()) {
        return Err(Error::InvalidInput("thresholds must be finite".into()));
    }
    let exponent = 2.0 / m as f64;
    let value: Vec<f64> = t_grid
        .iter()
        .map(|t| epsilon_bound * (a + b * t).powf(exponent))
        .collect();
    let crossings = thresholds
        .iter()
        .map(|&lam| (lam, t_grid.iter().zip(&value).find(|(_, v)| **v >= lam).map(|(t, _)| *t)))
        .collect();
    let strictly_increasing = value.windows(2).all(|w| w[1] > w[0]);
    Ok(BergerCurve {
        t: t_grid.to_vec(),
        value,
        crossings,
        strictly_increasing,
    })
}

/// `C_ρ = ½ max_i max |∇ρ_i|²` from partition-of-unity samples on a uniform
/// grid, using forward differences (with wrap-around if `periodic`).
pub fn c_rho_from_samples(functions: &[Vec<f64>], spacing: f64, periodic: bool) -> Result<f64> {
    if functions.is_empty() || !(spacing.is_finite() && spacing > 0.0) {
        return Err(Error::InvalidInput("need at least one function and spacing > 0".into()));
    }
    let len = functions[0].len();
    if len < 2 || functions.iter().any(|f| f.len() != len) {
        return Err(Error::InvalidInput("samples must share a length of at least 2".into()));
    }
    for p in 0..len {
        let s: f64 = functions.iter().map(|f| f[p]).sum();
        if !((s - 1.0).abs() <= 1e-9) || functions.iter().any(|f| !(f[p] >= 0.0)) {
            return Err(cover_err(format!("samples are not a partition of unity at point {p}")));
        }
    }
    let edges = if periodic { len } else { len - 1 };
    let mut worst: f64 = 0.0;
    for f in functions {
        for p in 0..edges {
            let g = (f[(p + 1) % len] - f[p]) / spacing;
            worst = worst.max(g * g);
        }
    }
    Ok(0.5 * worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn two_set() -> CoverSpec {
        CoverSpec::new(vec![1.0, 1.0], vec![vec![1], vec![0]], [((0, 1), 1.0)], 1.0).unwrap()
    }

    #[test]
    fn single_set_passes_through() {
        let c = CoverSpec::new(vec![3.0], vec![vec![]], [], 0.7).unwrap();
        let r = laplacian_bound(&c, NConvention::Unordered).unwrap();
        assert_eq!(r.mu_bound, 3.0);
        assert_eq!(r.lambda_bound, 3.0f64.sqrt());
        assert_eq!(r.n.n, 1);
        assert_eq!(dirac_bound(&c, NConvention::Unordered).unwrap().lambda_bound, 3.0);
    }

    #[test]
    fn two_set_fixture() {
        let r = laplacian_bound(&two_set(), NConvention::Unordered).unwrap();
        assert_eq!(r.per_set_terms, vec![17.0, 17.0]);
        assert_eq!(r.mu_bound, 1.0 / 34.0);
        let d = dirac_bound(&two_set(), NConvention::Unordered).unwrap();
        let exact = 1.0 / 34f64.sqrt();
        assert!((d.lambda_bound - exact).abs() <= f64::EPSILON * exact);
    }

    #[test]
    fn three_chain() {
        let c = CoverSpec::new(
            vec![2.0, 1.0, 2.0],
            vec![vec![1], vec![0, 2], vec![1]],
            [((1, 0), 1.0), ((1, 2), 1.0)],
            2.0,
        )
        .unwrap();
        let r = laplacian_bound(&c, NConvention::Unordered).unwrap();
        assert_eq!(r.per_set_terms, vec![18.5, 37.0, 18.5]);
        assert_eq!(r.mu_bound, 1.0 / 74.0);
        assert_eq!(r.n, NCount { n1: 0, n2: 0, n: 1 });
    }

    #[test]
    fn n_conventions() {
        let c = two_set().with_h_pair([((1, 0), 2)]).unwrap();
        assert_eq!(compute_n(&c, NConvention::Unordered).unwrap().n, 3);
        assert!(compute_n(&c, NConvention::Literal).is_err());
        let c = c.with_h_set(vec![1, 1]).unwrap();
        let lit = compute_n(&c, NConvention::Literal).unwrap();
        assert_eq!((lit.n1, lit.n2), (2 + 4, 2 + 12));
    }

    #[test]
    fn cover_validation() {
        assert!(CoverSpec::new(vec![1.0, 0.0], vec![vec![1], vec![0]], [((0, 1), 1.0)], 1.0).is_err());
        assert!(CoverSpec::new(vec![1.0, 1.0], vec![vec![1], vec![]], [((0, 1), 1.0)], 1.0).is_err());
        assert!(CoverSpec::new(vec![1.0, 1.0], vec![vec![1], vec![0]], [], 1.0).is_err());
        assert!(CoverSpec::new(vec![1.0, 1.0], vec![vec![], vec![]], [((0, 1), 1.0)], 1.0).is_err());
        assert!(CoverSpec::new(vec![1.0], vec![vec![]], [], -1.0).is_err());
        assert!(two_set().with_h_triple([((0, 1, 1), 1)]).is_err());
    }

    #[test]
    fn kunneth_merges() {
        assert_eq!(kunneth_min_sum(&[0.0, 1.0], &[0.0, 4.0], 10).unwrap(), vec![0.0, 1.0, 4.0, 5.0]);
        assert_eq!(kunneth_min_sum(&[0.0, 1.0, 4.0], &[0.0, 1.0, 4.0], 3).unwrap(), vec![0.0, 1.0, 1.0]);
        assert!(kunneth_min_sum(&[], &[1.0], 1).is_err());
        assert!(kunneth_min_sum(&[2.0, 1.0], &[1.0], 1).is_err());
    }

    #[test]
    fn berger_values() {
        let c = berger_scaling(1.0, 1.0, 2, 0.1, &[0.0, 3.0], &[]).unwrap();
        assert_eq!(c.value, vec![0.1, 0.4]);
        assert!(berger_scaling(1.0, 1.0, 1, 0.1, &[0.0], &[]).is_err());
        assert!(berger_scaling(1.0, 0.0, 2, 0.1, &[0.0], &[]).is_err());
    }

    #[test]
    fn c_rho_of_linear_ramp() {
        let up: Vec<f64> = (0..5).map(|i| i as f64 / 4.0).collect();
        let down: Vec<f64> = up.iter().map(|x| 1.0 - x).collect();
        let c = c_rho_from_samples(&[up, down], 0.5, false).unwrap();
        assert_eq!(c, 0.5 * 0.25);
        assert!(c_rho_from_samples(&[vec![0.5, 0.5]], 1.0, false).is_err());
    }
}
