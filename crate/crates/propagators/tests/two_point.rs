use num_complex::Complex64;
use propagators::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn closed_form_at_unit_imaginary_time() {
    let v = vac_two_point(&ComplexTimeDisplacement::imaginary(1.0, 0.0), &FieldParams::vacuum(1.0)).unwrap();
    let want = 0.601_907_230_197_234_6 / (4.0 * PI * PI);
    assert!((v.re - want).abs() < 1e-15 && v.im == 0.0);
}

#[test]
fn closed_form_matches_quadrature_on_grid() {
    let cfg = QuadratureConfig::default();
    for &m in &[0.5, 1.0, 2.0] {
        for &u in &[0.2, 1.0, 3.0] {
            for &r in &[0.0, 1.0, 5.0] {
                let p = FieldParams::vacuum(m);
                let d = ComplexTimeDisplacement::imaginary(u, r);
                let closed = vac_two_point(&d, &p).unwrap();
                let quad = vac_two_point_quadrature(&d, &p, &cfg).unwrap();
                assert!(rel(quad.value, closed) < 1e-8, "m={m} u={u} r={r}: {} vs {closed}", quad.value);
            }
        }
    }
}

#[test]
fn closed_form_matches_quadrature_at_real_time() {
    let cfg = QuadratureConfig::default();
    for &(t, u, r) in &[(0.5, 1.0, 0.0), (-1.3, 0.4, 2.0), (3.0, 0.7, 1.0)] {
        let p = FieldParams::vacuum(1.0);
        let d = ComplexTimeDisplacement::new(t, u, r);
        let closed = vac_two_point(&d, &p).unwrap();
        let quad = vac_two_point_quadrature(&d, &p, &cfg).unwrap();
        assert!(rel(quad.value, closed) < 1e-9, "{d:?}: {} vs {closed}", quad.value);
    }
}

#[test]
fn deep_imaginary_time_is_exponentially_small() {
    let p = FieldParams::vacuum(1.0);
    let far = vac_two_point(&ComplexTimeDisplacement::imaginary(10.0, 0.0), &p).unwrap();
    let near = vac_two_point(&ComplexTimeDisplacement::imaginary(1.0, 0.0), &p).unwrap();
    assert!(far.re < (-9.0f64).exp() * near.re);
}

#[test]
fn inadmissible_displacements_are_rejected() {
    let p = FieldParams::vacuum(1.0);
    assert!(vac_two_point(&ComplexTimeDisplacement::imaginary(0.0, 0.0), &p).is_err());
    assert!(vac_two_point(&ComplexTimeDisplacement::imaginary(-0.1, 1.0), &p).is_err());
    assert!(vac_two_point(&ComplexTimeDisplacement::imaginary(1.0, 1.0), &FieldParams::vacuum(0.0)).is_err());
    let th = FieldParams::thermal(1.0, 2.0);
    assert!(kms_two_point(&ComplexTimeDisplacement::imaginary(2.0, 1.0), &th).is_err());
    assert!(kms_two_point(&ComplexTimeDisplacement::imaginary(0.0, 1.0), &th).is_err());
}

#[test]
fn vacuum_flag_reduces_to_vacuum_function() {
    let p = FieldParams::vacuum(1.3);
    let d = ComplexTimeDisplacement::new(0.4, 0.9, 1.1);
    assert_eq!(kms_two_point(&d, &p).unwrap(), vac_two_point(&d, &p).unwrap());
}

#[test]
fn quadrature_route_matches_image_sum() {
    for &(m, beta) in &[(1.0, 1.0), (0.5, 2.0), (2.0, 0.7)] {
        let p = FieldParams::thermal(m, beta);
        for &(tf, uf, r) in &[(0.0, 0.3, 0.0), (0.2, 0.5, 1.0), (-0.7, 0.1, 0.4), (1.0, 0.9, 3.0)] {
            let d = ComplexTimeDisplacement::new(tf, uf * beta, r);
            let a = kms_two_point(&d, &p).unwrap();
            let b = kms_two_point_images(&d, &p).unwrap();
            assert!(rel(a, b) < 1e-10, "m={m} beta={beta} {d:?}: {a} vs {b}");
        }
    }
}

#[test]
fn boundary_members_agree() {
    let cases = [(0.0, 1.0, 2.0), (1.0, 0.5, 1.0), (0.3, 3.0, 1.0)];
    for (t, r, beta) in cases {
        let c = kms_boundary_check(t, r, &FieldParams::thermal(1.0, beta)).unwrap();
        assert!(c.relative_gap() < 1e-6, "t={t} r={r}: {:?}", c.members());
    }
}

#[test]
fn thermal_excess_shrinks_with_beta() {
    let d = ComplexTimeDisplacement::imaginary(0.3, 0.5);
    let vac = vac_two_point(&d, &FieldParams::vacuum(1.0)).unwrap();
    let mut last = f64::INFINITY;
    for &beta in &[1.0, 2.0, 4.0, 8.0, 16.0] {
        let th = kms_two_point(&d, &FieldParams::thermal(1.0, beta)).unwrap();
        let gap = (th - vac).norm();
        assert!(gap < last);
        last = gap;
    }
    assert!(last < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kms_symmetry_at_imaginary_time(m in 0.3f64..2.5, beta in 0.4f64..3.0, uf in 0.02f64..0.98, r in 0.0f64..4.0) {
        let p = FieldParams::thermal(m, beta);
        let u = uf * beta;
        let a = kms_two_point(&ComplexTimeDisplacement::imaginary(u, r), &p).unwrap();
        let b = kms_two_point(&ComplexTimeDisplacement::imaginary(beta - u, r), &p).unwrap();
        prop_assert!(rel(a, b) < 1e-10);
        prop_assert!(a.re > 0.0 && a.im.abs() < 1e-12 * a.re);
    }

    #[test]
    fn euclidean_closed_form_depends_on_distance_only(m in 0.2f64..3.0, u in 0.05f64..4.0, r in 0.05f64..4.0) {
        let p = FieldParams::vacuum(m);
        let a = vac_two_point(&ComplexTimeDisplacement::imaginary(u, r), &p).unwrap();
        let b = vac_two_point(&ComplexTimeDisplacement::imaginary(r, u), &p).unwrap();
        prop_assert!(rel(a, b) < 1e-14);
    }

    #[test]
    fn time_reflection_conjugates(m in 0.3f64..2.0, t in -2.0f64..2.0, u in 0.05f64..2.0, r in 0.0f64..3.0) {
        let p = FieldParams::vacuum(m);
        let a = vac_two_point(&ComplexTimeDisplacement::new(t, u, r), &p).unwrap();
        let b = vac_two_point(&ComplexTimeDisplacement::new(-t, u, r), &p).unwrap();
        prop_assert!(rel(a, b.conj()) < 1e-13);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn matsubara_series_matches_image_sum(
        m in 0.3f64..2.0,
        beta in 0.5f64..3.0,
        t in -0.5f64..0.5,
        uf in 0.0f64..1.0,
        re in 0.6f64..5.0,
        im in -0.2f64..0.2,
    ) {
        let p = FieldParams::thermal(m, beta);
        let r = Complex64::new(re, im);
        let a = thermal_matsubara_at(t, uf * beta, r, &p, 1e-15).unwrap();
        let b = thermal_images_at(t, uf * beta, r, &p).unwrap();
        prop_assert!(rel(a, b) < 1e-11, "{} vs {}", a, b);
    }
}

#[test]
fn matsubara_series_needs_spacelike_real_part() {
    let p = FieldParams::thermal(1.0, 1.0);
    assert!(thermal_matsubara_at(0.5, 0.3, Complex64::new(0.4, 0.0), &p, 1e-12).is_err());
    assert!(thermal_matsubara_at(0.0, 0.3, Complex64::new(1.0, 0.0), &FieldParams::vacuum(1.0), 1e-12).is_err());
}
