//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines always show up in `cargo test` output.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_bounds::discrete_hodge::{
    build_circle_complex, build_interval_complex, s1_case_study, verify_decomposition, verify_eigenspace_pairing,
    verify_multiplicities, BoundaryKind,
};
use spectral_bounds::dissection::{berger_scaling, dirac_bound, laplacian_bound, CoverSpec, NConvention};
use spectral_bounds::geometry::{DegenerationSchedule, TubeGeometry};
use spectral_bounds::ode_compare::{dirichlet_growth, random_suite, run_suite};
use spectral_bounds::sturm_liouville::{
    cross_validate, solve_fd, BoundaryCondition, SlProblem, Window,
};
use spectral_bounds::torus_modes::{fiber_eigenfunction, verify_mode_identities, ModeIndex};
use spectral_bounds::tube_spectrum::{sweep, SweepOptions};

type Outcome = Result<String, String>;

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn classical_spectra() -> Outcome {
    let d = BoundaryCondition::Dirichlet;
    let n = BoundaryCondition::neumann();
    let dir = SlProblem::new(|_u: f64| 0.0, 0.0, PI, d, d).map_err(|e| e.to_string())?;
    let r = solve_fd(&dir, 400, Window::new(0.0, 26.0).unwrap()).map_err(|e| e.to_string())?;
    let expected: Vec<f64> = (1..=5).map(|k| (k * k) as f64).collect();
    if r.eigenvalues.len() != 5 {
        return Err(format!("Dirichlet: {} eigenvalues in (0, 26)", r.eigenvalues.len()));
    }
    let worst_d = r.eigenvalues.iter().zip(&expected).map(|(v, e)| rel(*v, *e)).fold(0.0, f64::max);

    let neu = SlProblem::new(|_u: f64| 0.0, 0.0, PI, n, n).map_err(|e| e.to_string())?;
    let r = solve_fd(&neu, 400, Window::new(-0.5, 17.0).unwrap()).map_err(|e| e.to_string())?;
    let expected: Vec<f64> = (0..5).map(|k| (k * k) as f64).collect();
    if r.eigenvalues.len() != 5 {
        return Err(format!("Neumann: {} eigenvalues in (-0.5, 17)", r.eigenvalues.len()));
    }
    // the zero eigenvalue has no relative scale
    let worst_n = r
        .eigenvalues
        .iter()
        .zip(&expected)
        .map(|(v, e)| if *e == 0.0 { v.abs() } else { rel(*v, *e) })
        .fold(0.0, f64::max);
    check(
        worst_d <= 1e-6 && worst_n <= 1e-6,
        format!("max rel error Dirichlet {worst_d:.2e}, Neumann {worst_n:.2e} (tol 1e-6)"),
    )
}

fn method_agreement() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for case in 0..10 {
        let len = rng.gen_range(1.0..4.0);
        let terms: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.gen_range(-3.0..3.0), rng.gen_range(0.5..4.0), rng.gen_range(0.0..2.0 * PI)))
            .collect();
        let q = move |u: f64| terms.iter().map(|(a, w, p)| a * (w * u + p).sin()).sum::<f64>();
        let mut bc = || match rng.gen_range(0..3) {
            0 => BoundaryCondition::Dirichlet,
            1 => BoundaryCondition::neumann(),
            _ => BoundaryCondition::robin(rng.gen_range(-1.5..1.5)),
        };
        let (left, right) = (bc(), bc());
        let p = SlProblem::new(q, 0.0, len, left, right).map_err(|e| e.to_string())?;
        let lo = p.spectral_lower_bound(4096).map_err(|e| e.to_string())? - 1.0;
        let window = Window::new(lo, lo + 60.0).unwrap();
        let cv = cross_validate(&p, 1000, window).map_err(|e| format!("case {case}: {e}"))?;
        if !cv.agree {
            return Err(format!("case {case}: solvers disagree by {:.2e}", cv.max_discrepancy));
        }
        if cv.combined.is_empty() {
            return Err(format!("case {case}: empty window"));
        }
        count += cv.combined.len();
        worst = worst.max(cv.max_discrepancy);
    }
    check(
        worst <= 1e-6,
        format!("10 potentials, {count} eigenvalues, max discrepancy {worst:.2e} (tol 1e-6)"),
    )
}

fn fiber_modes() -> Outcome {
    let modes = [
        ModeIndex::new(1, 0),
        ModeIndex::new(-1, 0),
        ModeIndex::new(0, 1),
        ModeIndex::new(0, -1),
        ModeIndex::new(1, 1),
        ModeIndex::new(-1, 1),
        ModeIndex::new(2, -1),
        ModeIndex::new(3, 0),
        ModeIndex::new(0, 2),
        ModeIndex::new(-2, 3),
    ];
    let mut worst_identity: f64 = 0.0;
    let mut worst_norm: f64 = 0.0;
    let mut worst_orth: f64 = 0.0;
    for radius in [6.0, 10.0] {
        let g = DegenerationSchedule::unit(vec![radius])
            .and_then(|s| s.instantiate(0))
            .and_then(|g| g.with_inner(2.0))
            .map_err(|e| e.to_string())?;
        let (r0, r1) = g.interval().map_err(|e| e.to_string())?;
        let samples: Vec<f64> = (1..8).map(|i| r0 + (r1 - r0) * i as f64 / 8.0).collect();
        for &m in &modes {
            let rep = verify_mode_identities(m, &g, &samples).map_err(|e| e.to_string())?;
            worst_identity = worst_identity.max(rep.max_residual());
        }
        for &u in &samples[..3] {
            for (i, &a) in modes.iter().enumerate() {
                worst_norm = worst_norm.max((fiber_inner(&g, a, a, u).0 - 1.0).abs());
                let b = modes[(i + 1) % modes.len()];
                let (re, im) = fiber_inner(&g, a, b, u);
                worst_orth = worst_orth.max(re.hypot(im));
            }
        }
    }
    check(
        worst_identity <= 1e-6 && worst_norm <= 1e-8 && worst_orth <= 1e-8,
        format!(
            "identity residual {worst_identity:.2e} (tol 1e-6), norm {worst_norm:.2e}, orthogonality {worst_orth:.2e} (tol 1e-8)"
        ),
    )
}

/// `∫ g_a conj(g_b) f h dt dθ` over the fundamental domain, periodic
/// trapezoid rule.
fn fiber_inner(g: &TubeGeometry, a: ModeIndex, b: ModeIndex, u: f64) -> (f64, f64) {
    let nodes = 64;
    let eps = g.epsilon();
    let p = g.profile();
    let weight = (eps / nodes as f64) * (2.0 * PI / nodes as f64) * p.f(u) * p.h(u);
    let (mut re, mut im) = (0.0, 0.0);
    for i in 0..nodes {
        for j in 0..nodes {
            let t = eps * i as f64 / nodes as f64;
            let th = 2.0 * PI * j as f64 / nodes as f64;
            let x = fiber_eigenfunction(a, g, u, t, th);
            let y = fiber_eigenfunction(b, g, u, t, th);
            re += weight * (x.0 * y.0 + x.1 * y.1);
            im += weight * (x.1 * y.0 - x.0 * y.1);
        }
    }
    (re, im)
}

fn tube_threshold() -> Outcome {
    let schedule = DegenerationSchedule::unit(vec![6.0, 8.0, 10.0]).map_err(|e| e.to_string())?;
    let rows = sweep(&schedule, &SweepOptions::default());
    let mut parts = Vec::new();
    let mut ok = true;
    for row in rows {
        match row.outcome {
            Ok(s) => {
                let m = &s.spectrum.min_positive_offzero;
                let pass = s.spectrum.passes_threshold(1.0);
                ok &= pass;
                parts.push(format!(
                    "R={} r0={} lambda1={:.6} ({}, mode ({},{})), {} in (0,2]",
                    row.radius,
                    s.r0.r0,
                    m.eigenvalue,
                    if m.agree { "cross-validated" } else { "solvers disagree" },
                    m.mode.r,
                    m.mode.s,
                    s.spectrum.entries.len()
                ));
            }
            Err(e) => {
                ok = false;
                parts.push(format!("R={}: {e}", row.radius));
            }
        }
    }
    check(ok, parts.join("; "))
}

fn ode_comparison() -> Outcome {
    let reports = run_suite(7, 20).map_err(|e| e.to_string())?;
    let passed = reports.iter().filter(|r| r.riccati.passed() && r.slope.passed()).count();
    let min_margin = reports.iter().map(|r| r.riccati.min_margin).fold(f64::INFINITY, f64::min);
    let min_slope_gap = reports
        .iter()
        .map(|r| r.slope.slope - 0.5 * r.case.k)
        .fold(f64::INFINITY, f64::min);
    let mut growth_ok = 0;
    for rc in random_suite(11, 10) {
        let case = rc.case().map_err(|e| e.to_string())?;
        let g = dirichlet_growth(&case, rc.slope, None).map_err(|e| e.to_string())?;
        if g.passed() {
            growth_ok += 1;
        }
    }
    check(
        passed == 20 && growth_ok == 10,
        format!(
            "comparison {passed}/20 (min Riccati margin {min_margin:.2e}, min slope - k/2 {min_slope_gap:.3}), growth {growth_ok}/10"
        ),
    )
}

fn random_cover(rng: &mut ChaCha8Rng) -> CoverSpec {
    let n = rng.gen_range(1..7usize);
    let mut adjacency = vec![Vec::new(); n];
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if j == i + 1 || rng.gen_bool(0.3) {
                adjacency[i].push(j);
                adjacency[j].push(i);
                pairs.push(((i, j), rng.gen_range(0.05..5.0)));
            }
        }
    }
    let mu_set = (0..n).map(|_| rng.gen_range(0.05..5.0)).collect();
    CoverSpec::new(mu_set, adjacency, pairs, rng.gen_range(0.0..3.0)).expect("valid random cover")
}

fn squared(c: &CoverSpec) -> CoverSpec {
    CoverSpec::new(
        c.mu_set().iter().map(|x| x * x).collect(),
        c.adjacency().to_vec(),
        c.mu_pairs().iter().map(|(k, v)| (*k, v * v)),
        c.c_rho(),
    )
    .expect("squares of a valid cover")
}

fn dissection_regression() -> Outcome {
    let conv = NConvention::Unordered;
    let single = CoverSpec::new(vec![2.5], vec![vec![]], [], 7.0).map_err(|e| e.to_string())?;
    let single_ok = laplacian_bound(&single, conv).map_err(|e| e.to_string())?.mu_bound == 2.5;
    let two = CoverSpec::new(vec![1.0, 1.0], vec![vec![1], vec![0]], [((0, 1), 1.0)], 1.0).map_err(|e| e.to_string())?;
    let lap = laplacian_bound(&two, conv).map_err(|e| e.to_string())?.mu_bound;
    let dir = dirac_bound(&two, conv).map_err(|e| e.to_string())?.lambda_bound;
    let two_ok = lap == 1.0 / 34.0 && dir == (1.0f64 / 34.0).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut sqrt_ok = 0;
    for _ in 0..100 {
        let c = random_cover(&mut rng);
        let d = dirac_bound(&c, conv).map_err(|e| e.to_string())?;
        let l = laplacian_bound(&squared(&c), conv).map_err(|e| e.to_string())?;
        if d.lambda_bound == l.mu_bound.sqrt() && d.mu_bound == l.mu_bound {
            sqrt_ok += 1;
        }
    }

    let mut mono_ok = 0;
    for _ in 0..100 {
        let c = random_cover(&mut rng);
        let base = laplacian_bound(&c, conv).map_err(|e| e.to_string())?.mu_bound;
        let factor = rng.gen_range(1.0..3.0);
        let mut mu_set = c.mu_set().to_vec();
        let mut pairs = c.mu_pairs().clone();
        let mut c_rho = c.c_rho();
        match rng.gen_range(0..3) {
            0 => {
                let i = rng.gen_range(0..mu_set.len());
                mu_set[i] *= factor;
            }
            1 if !pairs.is_empty() => {
                let k = *pairs.keys().nth(rng.gen_range(0..pairs.len())).unwrap();
                *pairs.get_mut(&k).unwrap() *= factor;
            }
            _ => c_rho /= factor,
        }
        let p = CoverSpec::new(mu_set, c.adjacency().to_vec(), pairs, c_rho).map_err(|e| e.to_string())?;
        let after = laplacian_bound(&p, conv).map_err(|e| e.to_string())?.mu_bound;
        if after >= base && base > 0.0 {
            mono_ok += 1;
        }
    }
    check(
        single_ok && two_ok && sqrt_ok == 100 && mono_ok == 100,
        format!(
            "single-set {single_ok}, two-set 1/34 {two_ok}, dirac = sqrt(laplacian) {sqrt_ok}/100, monotone {mono_ok}/100"
        ),
    )
}

fn s1_oracle() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [64usize, 128] {
        for f in [0.125, 0.25] {
            let r = s1_case_study(n, f).map_err(|e| e.to_string())?;
            // independent check of the diagonalised truth against the circulant closed form
            let step = 2.0 * PI / n as f64;
            let mut closed: Vec<f64> = (1..n).map(|k| 4.0 * (PI * k as f64 / n as f64).sin().powi(2) / (step * step)).collect();
            closed.sort_by(f64::total_cmp);
            let truth_ok = closed.len() == r.truth_spectrum.len()
                && closed.iter().zip(&r.truth_spectrum).all(|(a, b)| (a - b).abs() <= 1e-9 * a.max(1.0));
            let pass = r.passed() && truth_ok;
            ok &= pass;
            parts.push(format!("n={n} f={f}: bound {:.4e} <= mu_N {:.4e} (N={})", r.bound.mu_bound, r.mu_n, r.bound.n.n));
        }
    }
    check(ok, parts.join("; "))
}

fn structure_suite() -> Outcome {
    let mut complexes = Vec::new();
    for n in [4usize, 8, 16, 33, 64, 128] {
        let name = |k: &str| format!("{k} n={n}");
        complexes.push((name("circle"), build_circle_complex(n, 2.0 * PI)));
        complexes.push((name("interval abs"), build_interval_complex(n, 1.0, BoundaryKind::Absolute)));
        complexes.push((name("interval rel"), build_interval_complex(n, 1.0, BoundaryKind::Relative)));
    }
    let mut worst: f64 = 0.0;
    let mut rows = 0;
    for (name, c) in complexes {
        let c = c.map_err(|e| format!("{name}: {e}"))?;
        let rep = verify_decomposition(&c);
        if !rep.passed(1e-12) {
            return Err(format!("{name}: identities fail (residual {:.2e})", rep.max_identity_residual()));
        }
        worst = worst.max(rep.max_identity_residual()).max(rep.orthogonality_residual);
        let mult = verify_multiplicities(&c);
        if !mult.consistent {
            return Err(format!("{name}: multiplicity bookkeeping inconsistent"));
        }
        rows += mult.rows.len();
        if let Some(row) = mult.rows.iter().find(|r| r.eigenvalue > 1e-9) {
            let split = verify_eigenspace_pairing(&c, row.eigenvalue).map_err(|e| format!("{name}: {e}"))?;
            if !split.passed(1e-9) {
                return Err(format!("{name}: exact/coexact pairing fails at {}", row.eigenvalue));
            }
        }
    }
    check(true, format!("18 complexes, max residual {worst:.2e} (tol 1e-12), {rows} eigenvalue groups checked"))
}

fn berger_curve() -> Outcome {
    let grid: Vec<f64> = (0..=200).map(f64::from).collect();
    let c = berger_scaling(1.0, 1.0, 2, 0.1, &grid, &[10.0]).map_err(|e| e.to_string())?;
    let t_star = c.crossings[0].1.ok_or("threshold never reached")?;
    let i = t_star as usize;
    check(
        t_star == 99.0 && c.value[i] >= 10.0 && c.value[i - 1] < 10.0 && c.strictly_increasing,
        format!(
            "t* = {t_star}, curve(t*) = {}, curve(t* - 1) = {}, strictly increasing {}",
            c.value[i], c.value[i - 1], c.strictly_increasing
        ),
    )
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() -> ExitCode {
    let criteria = [
        Criterion { id: 1, name: "classical spectra", budget: Some(Duration::from_secs(1)), run: classical_spectra },
        Criterion { id: 2, name: "method agreement", budget: Some(Duration::from_secs(10)), run: method_agreement },
        Criterion { id: 3, name: "fiber-mode identities", budget: Some(Duration::from_secs(5)), run: fiber_modes },
        Criterion { id: 4, name: "tube threshold", budget: Some(Duration::from_secs(60)), run: tube_threshold },
        Criterion { id: 5, name: "ODE comparison", budget: Some(Duration::from_secs(10)), run: ode_comparison },
        Criterion { id: 6, name: "dissection regression", budget: None, run: dissection_regression },
        Criterion { id: 7, name: "S1 validity oracle", budget: Some(Duration::from_secs(30)), run: s1_oracle },
        Criterion { id: 8, name: "complex structure suite", budget: None, run: structure_suite },
        Criterion { id: 9, name: "Berger curve", budget: None, run: berger_curve },
    ];
    let mut failures = 0;
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let over = c.budget.is_some_and(|b| elapsed > b);
        let (pass, detail) = match outcome {
            Ok(d) => (!over, d),
            Err(d) => (false, d),
        };
        let budget = c.budget.map_or(String::new(), |b| format!(" / {:.0} s", b.as_secs_f64()));
        let timing = format!("{:.2} s{budget}", elapsed.as_secs_f64());
        println!(
            "criterion {} [{}] {} ({timing}{}): {detail}",
            c.id,
            if pass { "PASS" } else { "FAIL" },
            c.name,
            if over { ", over budget" } else { "" }
        );
        if !pass {
            failures += 1;
        }
    }
    println!("acceptance: {}/{} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
