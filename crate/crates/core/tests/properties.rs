use hypwave_core::counterexample::band_mass;
use hypwave_core::experiments::loglog_slope;
use hypwave_core::propagator::{gaussian_band, geometric_time_grid, Propagator};
use hypwave_core::quadrature::{osc_integral, OscillatorySpec};
use hypwave_core::specfun::{gamma_real, phi_closed_h3, plancherel_density, spherical_function};
use hypwave_core::{CurveFamily, Space};
use num_complex::Complex64;
use proptest::prelude::*;

fn spaces() -> impl Strategy<Value = Space> {
    prop_oneof![
        Just(Space::h3()),
        Just(Space::damek_ricci(2, 1).unwrap()),
        Just(Space::damek_ricci(4, 3).unwrap()),
        (2u32..6).prop_map(|n| Space::euclidean(n).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curves_start_at_the_point(s in 0.0f64..10.0, c7 in 0.0f64..5.0) {
        prop_assert_eq!(CurveFamily::vertical().radial_eval(s, 0.0), s);
        prop_assert_eq!(CurveFamily::parabolic(c7).unwrap().radial_eval(s, 0.0), s);
    }

    #[test]
    fn parabolic_curves_are_half_holder(s in 0.0f64..5.0, t in -1.0f64..1.0, u in -1.0f64..1.0, c7 in 0.0f64..5.0) {
        let c = CurveFamily::parabolic(c7).unwrap();
        let dr = (c.radial_eval(s, t) - c.radial_eval(s, u)).abs();
        prop_assert!(dr <= c7 * (t - u).abs().sqrt() * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn spherical_functions_are_bounded(sp in spaces(), l in 0.0f64..40.0, s in 0.0f64..6.0) {
        let v = spherical_function(&sp, l, s).unwrap().value;
        prop_assert!(v.abs() <= 1.0 + 1e-6, "{} {} {} -> {}", sp, l, s, v);
    }

    #[test]
    fn h3_closed_form_is_bounded_and_even(l in 0.0f64..100.0, s in 0.0f64..20.0) {
        let v = phi_closed_h3(l, s);
        prop_assert!(v.abs() <= 1.0 + 1e-12);
        prop_assert_eq!(v, phi_closed_h3(-l, s));
    }

    #[test]
    fn plancherel_density_is_positive_and_h3_is_quadratic(sp in spaces(), l in 1e-3f64..1e3) {
        prop_assert!(plancherel_density(&sp, l).unwrap() > 0.0);
        let h3 = plancherel_density(&Space::h3(), l).unwrap() / (l * l);
        let h3_one = plancherel_density(&Space::h3(), 1.0).unwrap();
        prop_assert!((h3 / h3_one - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gamma_recurrence(x in 0.1f64..30.0) {
        let lhs = gamma_real(x + 1.0);
        prop_assert!((lhs / (x * gamma_real(x)) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn band_mass_is_additive(a in 3.0f64..50.0, f1 in 1.01f64..100.0, f2 in 1.01f64..100.0) {
        let (b, c) = (a * f1, a * f1 * f2);
        let whole = band_mass(a, c);
        prop_assert!((band_mass(a, b) + band_mass(b, c) - whole).abs() < 1e-12 * whole.max(1.0));
    }

    #[test]
    fn loglog_slope_recovers_powers(p in -3.0f64..3.0, k in 0.1f64..10.0) {
        let x: Vec<f64> = (1..8).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| k * v.powf(p)).collect();
        prop_assert!((loglog_slope(&x, &y) - p).abs() < 1e-10);
    }

    #[test]
    fn geometric_grids_are_symmetric(t_max in 0.01f64..1.0, per_side in 2usize..64) {
        let g = geometric_time_grid(t_max, 1e-6 * t_max, per_side).unwrap();
        prop_assert!(g.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(g.contains(&0.0));
        let n = g.len();
        for i in 0..n {
            prop_assert_eq!(g[i], -g[n - 1 - i]);
        }
        prop_assert!((g[n - 1] - t_max).abs() <= 1e-15 * t_max);
    }

    #[test]
    fn linear_phase_integrals(a in 0.5f64..200.0, lo in 0.0f64..5.0, len in 0.1f64..20.0) {
        let one = |_x: f64| Complex64::new(1.0, 0.0);
        let hi = lo + len;
        let r = osc_integral(&OscillatorySpec::new(&one, lo, hi).phase(a, 0.0, 0.0), 1e-11).unwrap();
        let exact = (Complex64::new(0.0, a * hi).exp() - Complex64::new(0.0, a * lo).exp()) / Complex64::new(0.0, a);
        prop_assert!((r.value - exact).norm() < 1e-9 * exact.norm().max(1.0 / a));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn propagator_is_dominated(center in 1.0f64..8.0, width in 0.3f64..1.5, s in 0.05f64..3.0, t in -0.5f64..0.5) {
        for sp in [Space::h3(), Space::euclidean(3).unwrap()] {
            let fhat = gaussian_band(center, width);
            let p = Propagator::new(&sp, &fhat, 1e-10).unwrap();
            let v = p.eval(s, t).unwrap().norm();
            prop_assert!(v <= p.dominating_bound() * (1.0 + 1e-9));
        }
    }
}
