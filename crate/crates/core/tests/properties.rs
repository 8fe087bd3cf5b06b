mod support;

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use cylbuck::ansatz::{build_ansatz, BumpProfile};
use cylbuck::fields::{
    axial_gradient_norm_sq, functional_family, functionals, gradient_and_strain_norms,
    DerivedSurface, Factor, FieldTerm, Measure, QuadratureGrid, SeparableField, SurfaceFunction,
};
use cylbuck::koiter::{optimal_buckling_mode, optimal_tangential, WaveNumbers};
use cylbuck::korn::scan::component_ratio_all_modes;
use cylbuck::korn::{
    korn_constant, min_rayleigh, mode_korn_quotient, ComponentGroup, Parity, RadialGrid, ScanBounds,
};
use cylbuck::material::{derive_material, ShellGeometry, StressWeight};
use cylbuck::rect::{planar_norms, random_strip_field, trial_rng, GradientKind};
use support::oracles::{bisect_min_eigenvalue, brute_tangential, q0_real, spd_pair};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tangential_optimum_matches_brute_force(m_hat in 0.3f64..20.0, n in 0u32..40, big_lambda in 0.2f64..6.0) {
        let wn = WaveNumbers::with_m_hat(m_hat, n);
        let (ft, fz) = optimal_tangential(Complex64::new(1.0, 0.0), &wn, big_lambda).unwrap();
        prop_assert!(ft.re.abs() < 1e-15 && fz.im.abs() < 1e-15);
        let (a, b) = brute_tangential(m_hat, n as f64, big_lambda);
        prop_assert!((ft.im - a).abs() <= 1e-6 * (1.0 + a.abs()), "a: {} vs {}", ft.im, a);
        prop_assert!((fz.re - b).abs() <= 1e-6 * (1.0 + b.abs()), "b: {} vs {}", fz.re, b);
        let q = q0_real(ft.im, fz.re, m_hat, n as f64, big_lambda);
        prop_assert!(q <= q0_real(a, b, m_hat, n as f64, big_lambda) * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn generalized_eigenvalue_matches_inertia_bisection(
        n in 2usize..7,
        entries in prop::collection::vec(-1.0f64..1.0, 2 * 36),
        shift in 0.0f64..0.5,
    ) {
        let (s, m) = spd_pair(n, &entries, shift);
        let r = min_rayleigh(&s, &m).unwrap();
        let oracle = bisect_min_eigenvalue(&s, &m);
        prop_assert!((r.value - oracle).abs() <= 1e-8 * oracle.abs().max(1e-3), "{} vs {}", r.value, oracle);
    }

    #[test]
    fn perfect_compressiveness_is_the_axial_gradient(
        coefs in prop::collection::vec(-1.0f64..1.0, 9),
        k in 0u32..6,
        m in 1u32..6,
        h in 0.01f64..0.3,
    ) {
        let g = ShellGeometry::new(h, 2.0).unwrap();
        let mat = derive_material(1.0, 0.3).unwrap();
        let w = PI * m as f64 / g.l;
        let kf = k as f64;
        let term = |c: &[f64], th: Factor, z: Factor| FieldTerm::new(c[0], vec![1.0, c[1], c[2]], th, z);
        let field = SeparableField::new(
            vec![term(&coefs[0..3], Factor::Cos(kf), Factor::Sin(w))],
            vec![term(&coefs[3..6], Factor::Sin(kf), Factor::Sin(w))],
            vec![term(&coefs[6..9], Factor::Cos(kf), Factor::Cos(w))],
        );
        let grid = QuadratureGrid::for_modes(&g, m, k, Measure::Volume);
        let c = functionals(&field, &StressWeight::Perfect, &mat, &grid).unwrap().c;
        let axial = axial_gradient_norm_sq(&field, &grid).unwrap();
        prop_assert!((c - axial).abs() <= 1e-10 * axial.max(1e-300));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn scan_agrees_with_exhaustive_search(log_h in -3.0f64..-1.0, l in 1.0f64..4.0) {
        let g = ShellGeometry::new(10f64.powf(log_h), l).unwrap();
        let grid = RadialGrid::legendre(&g, 6).unwrap();
        let b = ScanBounds { m_max: 24, n_max: 24 };
        let scanned = korn_constant(&g, b, &grid).unwrap();
        let mut best = f64::INFINITY;
        for m in 0..=b.m_max {
            for n in 0..=b.n_max {
                let wn = WaveNumbers::new(m, n, &g);
                let ps: &[Parity] = if n == 0 && m > 0 { &[Parity::Even, Parity::Odd] } else { &[Parity::Even] };
                for &p in ps {
                    best = best.min(mode_korn_quotient(&wn, p, &g, &grid).unwrap().value);
                }
            }
        }
        prop_assert!((scanned.value - best).abs() <= 1e-12 * best, "{} vs {}", scanned.value, best);
    }

    #[test]
    fn hoop_axial_ratio_never_exceeds_one(log_h in -4.0f64..-1.0, l in 0.5f64..4.0) {
        let g = ShellGeometry::new(10f64.powf(log_h), l).unwrap();
        let grid = RadialGrid::legendre(&g, 6).unwrap();
        let b = ScanBounds { m_max: 30, n_max: 30 };
        let max = component_ratio_all_modes(&g, ComponentGroup::ThetaThetaZz, b, &grid).unwrap();
        prop_assert!(max <= 1.0 + 1e-10, "{max}");
    }

    #[test]
    fn korn_value_stable_under_radial_refinement(log_h in -4.0f64..-1.5) {
        let g = ShellGeometry::new(10f64.powf(log_h), PI).unwrap();
        let grid = RadialGrid::legendre(&g, 8).unwrap();
        let fine = grid.refined(&g).unwrap();
        let b = ScanBounds::default_for(&g);
        let k = korn_constant(&g, b, &grid).unwrap().value;
        let kf = korn_constant(&g, b, &fine).unwrap().value;
        prop_assert!((k / kf - 1.0).abs() < 1e-3);
    }

    #[test]
    fn ansatz_quotient_bounded_below_by_korn_constant(n_h in 3u32..7, eta0 in 0.6f64..2.5) {
        let h = (n_h as f64).powi(-4);
        let g = ShellGeometry::new(h, PI).unwrap();
        let bump = BumpProfile::new(eta0, PI).unwrap();
        let a = build_ansatz(h, &bump, &g).unwrap();
        let (grad, strain) = gradient_and_strain_norms(&a.field, &a.grid(&g, 1)).unwrap();
        let grid = RadialGrid::legendre(&g, 8).unwrap();
        let k = korn_constant(&g, ScanBounds::default_for(&g), &grid).unwrap().value;
        prop_assert!(strain / grad >= k, "{} < {}", strain / grad, k);
    }

    #[test]
    fn ansatz_norms_stable_under_grid_refinement(n_h in 3u32..8, eta0 in 0.6f64..2.5, kappa in -0.3f64..0.3) {
        let h = (n_h as f64).powi(-4);
        let g = ShellGeometry::new(h, PI).unwrap();
        let bump = BumpProfile::new(eta0, PI).unwrap().with_shear(kappa).unwrap();
        let a = build_ansatz(h, &bump, &g).unwrap();
        let (g1, e1) = gradient_and_strain_norms(&a.field, &a.grid(&g, 1)).unwrap();
        let (g2, e2) = gradient_and_strain_norms(&a.field, &a.grid(&g, 2)).unwrap();
        prop_assert!((g1 / g2 - 1.0).abs() < 1e-3 && (e1 / e2 - 1.0).abs() < 1e-3);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn functional_family_is_amplitude_invariant(scale in prop_oneof![-1e3f64..-1e-3, 1e-3f64..1e3], m in 1u32..6) {
        let g = ShellGeometry::new(1e-3, PI).unwrap();
        let mat = derive_material(1.0, 0.3).unwrap();
        let (coef, field) = optimal_buckling_mode(m, &g, &mat).unwrap();
        let scaled = |f: &Arc<dyn SurfaceFunction>| -> Arc<dyn SurfaceFunction> {
            Arc::new(DerivedSurface { base: f.clone(), d_theta: 0, d_z: 0, coef: scale })
        };
        let mut scaled_field = field.clone();
        let p = &mut scaled_field.profile;
        (p.fr, p.ftheta, p.fz) = (scaled(&p.fr), scaled(&p.ftheta), scaled(&p.fz));
        let grid = QuadratureGrid::for_modes(&g, m, coef.wave.n, Measure::Volume);
        let a = functional_family(&field, &mat, &g, &grid).unwrap();
        let b = functional_family(&scaled_field, &mat, &g, &grid).unwrap();
        for (x, y) in [(a.k, b.k), (a.k1, b.k1), (a.k0, b.k0), (a.kstar.unwrap(), b.kstar.unwrap())] {
            prop_assert!((x / y - 1.0).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn planar_norms_are_homogeneous(seed in 0u64..1000, scale in 0.01f64..100.0, alpha in -1.0f64..1.0) {
        let (h, l) = (0.1, 1.0);
        let f = random_strip_field(&mut trial_rng(seed, 0), h, l);
        let zero = cylbuck::rect::PlanarField::zero(f.bc);
        let fs = zero.plus(&f, scale);
        let a = planar_norms(&f, GradientKind::Alpha(alpha), h, l);
        let b = planar_norms(&fs, GradientKind::Alpha(alpha), h, l);
        // ‖G‖² is quadratic, the other three are norms
        for (x, y, p) in [(a.g_sq, b.g_sq, 2), (a.e, b.e, 1), (a.u, b.u, 1), (a.v, b.v, 1)] {
            let want = scale.powi(p) * x;
            prop_assert!((y - want).abs() <= 1e-10 * want.max(1e-300), "{x} {y}");
        }
    }
}

#[test]
fn bisection_oracle_on_a_diagonal_pair() {
    let s = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, 1.0, 8.0]));
    let m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 4.0, 2.0]));
    assert!((bisect_min_eigenvalue(&s, &m) - 0.25).abs() < 1e-14);
}
