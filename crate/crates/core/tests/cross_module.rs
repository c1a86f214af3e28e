use spectral_bounds::discrete_hodge::{build_interval_complex, harmonic_dimension, smallest_exact_eigenvalue, BoundaryKind};
use spectral_bounds::geometry::DegenerationSchedule;
use spectral_bounds::sturm_liouville::count_below;
use spectral_bounds::torus_modes::{enumerate_modes, kappa_infimum};
use spectral_bounds::tube_spectrum::{assemble_mode_problem, find_r0, Family};

// Modes whose potential stays above 4 have no eigenvalue below 1 under either
// family.
#[test]
fn tube_modes_with_large_potential_have_nothing_below_one() {
    let schedule = DegenerationSchedule::unit(vec![6.0, 8.0]).unwrap();
    for j in 0..2 {
        let open = schedule.instantiate(j).unwrap();
        let r0 = find_r0(&open, 5.0).unwrap().r0;
        let g = open.with_inner(r0).unwrap();
        let mut checked = 0;
        for mode in enumerate_modes(3) {
            if mode.is_zero() {
                continue;
            }
            let inf = kappa_infimum(mode, &g).unwrap();
            assert!(inf > 4.0, "mode {mode:?} has inf kappa {inf}");
            for family in [Family::Abs1, Family::Abs2] {
                let p = assemble_mode_problem(mode, &g, family).unwrap();
                assert_eq!(count_below(&p, 1.0).map_err(|e| format!("{mode:?} {family:?} R={} {e}", g.radius())).unwrap(), 0, "mode {mode:?} {family:?}");
                checked += 1;
            }
        }
        assert_eq!(checked, 2 * (enumerate_modes(3).len() - 1));
    }
}

// The harmonic dimensions fed to the dissection count come from kernels of
// the discrete complexes.
#[test]
fn interval_kernels_match_boundary_conditions() {
    for n in [8, 17, 40] {
        let abs = build_interval_complex(n, 1.0, BoundaryKind::Absolute).unwrap();
        let rel = build_interval_complex(n, 1.0, BoundaryKind::Relative).unwrap();
        assert_eq!(harmonic_dimension(&abs), 1);
        assert_eq!(harmonic_dimension(&rel), 1);
        let step = 1.0 / (n - 1) as f64;
        let neumann = 4.0 * (std::f64::consts::PI / (2 * n) as f64).sin().powi(2) / (step * step);
        let mu = smallest_exact_eigenvalue(&abs).unwrap();
        assert!((mu - neumann).abs() <= 1e-9 * neumann, "n={n}: {mu} vs {neumann}");
    }
}
