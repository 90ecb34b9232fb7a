//! Randomised invariants.

use std::f64::consts::PI;

use proptest::prelude::*;
use swred::equations::{energy, ResidualBundle};
use swred::fields::{
    explicit_family_member, explicit_torus_solution, fit_explicit_family, gauge_apply, random_bandlimited_configuration,
    random_bandlimited_tangent, GaugeElement,
};
use swred::hk::{apply_structure, metric_g, omega_forms, Structure};
use swred::io::{read_configuration, write_configuration, Manifest};
use swred::linear::{dimension_formulas, DimensionCase};
use swred::surface::{green_invert, laplacian, partial_z, partial_zbar};
use swred::{ScalarField, TorusGrid, C64};

fn grid(n: usize) -> TorusGrid {
    TorusGrid::new(n, 2.0 * PI).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn explicit_family_solves_for_every_phase_and_shift(phase in -PI..PI, shift in -PI..PI, k in 1u32..4) {
        let c2 = 0.5 * k as f64;
        let c = explicit_family_member(grid(32), c2, phase, shift).unwrap();
        prop_assert!(ResidualBundle::evaluate(&c).report().max_residual() < 1e-12);
        let (p, s, d) = fit_explicit_family(&c, c2).unwrap();
        prop_assert!(d < 1e-12, "phase {p} shift {s} distance {d}");
    }

    #[test]
    fn energy_is_invariant_under_constant_gauge(seed in 0u64..1000, angle in -PI..PI) {
        let c = random_bandlimited_configuration(grid(16), seed, 4, 1.0).unwrap();
        let u = GaugeElement::constant(grid(16), angle);
        prop_assert!(close(energy(&c), energy(&gauge_apply(&u, &c)), 1e-12));
    }

    #[test]
    fn dolbeault_factorises_the_laplacian(seed in 0u64..1000) {
        let f = random_bandlimited_configuration(grid(16), seed, 4, 1.0).unwrap().psi1().clone();
        let lhs = partial_z(&partial_zbar(&f)).scale_re(4.0);
        prop_assert!((&lhs - &laplacian(&f)).max_abs() < 1e-10 * laplacian(&f).max_abs().max(1.0));
    }

    #[test]
    fn green_operator_inverts_on_zero_mean(seed in 0u64..1000) {
        let f = random_bandlimited_configuration(grid(16), seed, 4, 1.0).unwrap().psi2().clone();
        let m = f.mean();
        let f0 = f.map(|z| z - m);
        let u = green_invert(&f0).unwrap();
        prop_assert!((&laplacian(&u) - &f0).max_abs() < 1e-12);
        prop_assert!(u.mean().norm() < 1e-13);
        if m.norm() > 1e-8 {
            prop_assert!(green_invert(&f).is_err());
        }
    }

    #[test]
    fn metric_is_symmetric_and_positive(s1 in 0u64..1000, s2 in 1000u64..2000) {
        let x = random_bandlimited_tangent(grid(8), s1, 2, 1.0).unwrap();
        let y = random_bandlimited_tangent(grid(8), s2, 2, 1.0).unwrap();
        prop_assert!(close(metric_g(&x, &y), metric_g(&y, &x), 1e-13));
        prop_assert!(metric_g(&x, &x) > 0.0);
    }

    #[test]
    fn structures_are_isometries_and_forms_antisymmetric(s1 in 0u64..1000, s2 in 1000u64..2000) {
        let x = random_bandlimited_tangent(grid(8), s1, 2, 1.0).unwrap();
        let y = random_bandlimited_tangent(grid(8), s2, 2, 1.0).unwrap();
        for s in [Structure::I, Structure::J, Structure::K, Structure::IOmega] {
            let (sx, sy) = (apply_structure(s, &x), apply_structure(s, &y));
            prop_assert!(close(metric_g(&sx, &sy), metric_g(&x, &y), 1e-12));
        }
        let (a, b) = (omega_forms(&x, &y), omega_forms(&y, &x));
        for (p, q) in [(a.omega, b.omega), (a.w1, b.w1), (a.w2, b.w2), (a.w3, b.w3)] {
            prop_assert!(close(p, -q, 1e-12));
        }
        prop_assert!(omega_forms(&x, &x).w1.abs() < 1e-12 * metric_g(&x, &x));
    }

    #[test]
    fn configuration_container_round_trips(seed in 0u64..1000) {
        let c = random_bandlimited_configuration(grid(8), seed, 2, 1.0).unwrap();
        let mut buf = Vec::new();
        write_configuration(&mut buf, &c, &Manifest::new(c.grid(), "proptest")).unwrap();
        let (back, m) = read_configuration(std::str::from_utf8(&buf).unwrap()).unwrap();
        prop_assert_eq!(back.max_abs_diff(&c), 0.0);
        prop_assert_eq!(m.n, 8);
    }

    #[test]
    fn vortex_dimensions_swap_under_conjugation(g in 1i64..20, c1 in -20i64..20) {
        let a = dimension_formulas(g, c1, DimensionCase::VortexPsi1Zero).unwrap();
        let b = dimension_formulas(g, -c1, DimensionCase::VortexPsi2Zero).unwrap();
        prop_assert_eq!(a, b);
        prop_assert_eq!(dimension_formulas(g, c1, DimensionCase::N).unwrap(), 2 * g + 2);
        prop_assert_eq!(dimension_formulas(g, c1, DimensionCase::Sigma).unwrap(), 4 * g);
    }
}

#[test]
fn explicit_solution_rejects_non_periodic_parameters() {
    for c2 in [0.3, 0.75, -1.0, f64::NAN] {
        assert!(explicit_torus_solution(grid(16), c2, 0.0).is_err(), "c2 = {c2}");
    }
    let c = ScalarField::constant(grid(8), C64::new(1.0, 0.0));
    assert!(green_invert(&c).is_err());
}
