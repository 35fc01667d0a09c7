use cluster_decay::*;
use num_complex::Complex64;
use propagators::{vac_two_point, ComplexTimeDisplacement, FieldParams, QuadratureConfig};
use proptest::prelude::*;
use std::f64::consts::PI;
use wick_algebra::{connected_oracle, CorrelationProblem, WickMonomial};

fn radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
}

#[test]
fn two_line_value_at_zero_radius() {
    let vac = FieldParams::vacuum(1.0);
    let s = ClusterScan::spatial(vec![2, 2], vac, vec![1.0], [1.0, 0.0, 0.0], vec![0.0]);
    let f = cluster_function(&s, 0.0).unwrap();
    let d = vac_two_point(&ComplexTimeDisplacement::imaginary(1.0, 0.0), &vac).unwrap();
    assert!((f - d * d * 2.0).norm() < 1e-15 * f.norm());
}

#[test]
fn degree_mismatch_vanishes() {
    let s = ClusterScan::spatial(vec![1, 3], FieldParams::vacuum(1.0), vec![1.0], [1.0, 0.0, 0.0], vec![1.0, 2.0]);
    for r in [1.0, 2.0] {
        assert_eq!(cluster_function(&s, r).unwrap(), Complex64::new(0.0, 0.0));
    }
    let samples = scan(&s).unwrap();
    assert!(decay_fit(&samples, &FitOptions::window(0.0, 10.0)).is_err());
}

#[test]
fn triangle_matches_oracle() {
    let state = FieldParams::thermal(1.0, 2.0);
    let s = ClusterScan::spatial(vec![2, 2, 2], state, vec![0.5, 1.0], [0.0, 0.6, 0.8], vec![1.5]);
    let f = cluster_function(&s, 1.5).unwrap();
    let x = [0.0, 0.9, 1.2];
    let p = CorrelationProblem::new(
        vec![WickMonomial::at_origin(0, 2), WickMonomial::new(1, 2, 0.0, 0.5, x), WickMonomial::new(2, 2, 0.0, 1.0, x)],
        state,
    );
    let o = connected_oracle(&p).unwrap();
    assert!((f - o).norm() < 1e-12 * o.norm());
}

#[test]
fn synthetic_fit_is_exact() {
    let samples: Vec<ScanSample> = radii(1.0, 6.0, 11)
        .into_iter()
        .map(|r| ScanSample { r, r_e: r, u: [0.0; 4], value: Complex64::new(3.0 * (-2.0 * r).exp(), 0.0) })
        .collect();
    let fit = decay_fit(&samples, &FitOptions::window(0.0, 10.0)).unwrap();
    assert!((fit.rate - 2.0).abs() < 1e-6);
    assert!((fit.prefactor - 3.0).abs() < 1e-6);
    assert!(fit.residual < 1e-9);
    let sparse = FitOptions { noise_floor: 1e-4, ..FitOptions::window(0.0, 10.0) };
    let shrunk = decay_fit(&samples, &sparse).unwrap();
    assert!(shrunk.dropped_below_noise > 0 && shrunk.window.1 < 6.0);
}

#[test]
fn vacuum_two_line_scan_decays_at_twice_the_mass() {
    let vac = FieldParams::vacuum(1.0);
    let s = ClusterScan::spatial(vec![2, 2], vac, vec![1.0], [1.0, 0.0, 0.0], radii(4.0, 10.0, 25));
    let samples = scan(&s).unwrap();
    let fit = decay_fit(&samples, &FitOptions::window(5.0, 10.0)).unwrap();
    assert!(fit.rate >= 1.9, "rate {}", fit.rate);
    assert!(bound_check(&samples, 1.0).passed);
    let negative = bound_check(&samples, 1.5 * fit.rate);
    assert!(!negative.passed && negative.violation.is_some());
}

#[test]
fn vacuum_imaginary_time_ray_decays() {
    let vac = FieldParams::vacuum(1.0);
    let s = ClusterScan::imaginary_time_ray(vec![2, 2], vac, vec![0.5], radii(4.0, 10.0, 25));
    let samples = scan(&s).unwrap();
    let fit = decay_fit(&samples, &FitOptions::window(5.0, 10.0)).unwrap();
    assert!(fit.rate >= 1.9, "rate {}", fit.rate);
    assert!(bound_check(&samples, 1.0).passed);
}

#[test]
fn thermal_scan_decays_spatially() {
    let th = FieldParams::thermal(1.0, 1.0);
    let s = ClusterScan::spatial(vec![2, 2], th, vec![0.3], [0.0, 0.0, 1.0], radii(4.0, 10.0, 13));
    let samples = scan(&s).unwrap();
    let fit = decay_fit(&samples, &FitOptions::window(5.0, 10.0)).unwrap();
    assert!(fit.rate >= 1.9, "rate {}", fit.rate);
    assert!(bound_check(&samples, 1.0).passed);
}

#[test]
fn growing_samples_violate_the_bound() {
    let pts: Vec<(f64, f64)> = radii(1.0, 8.0, 15).into_iter().map(|r| (r, r.exp())).collect();
    let rep = bound_check_samples(&pts, 1.0);
    assert!(!rep.passed);
    assert!(rep.violation.is_some());
    let ok: Vec<(f64, f64)> = pts.iter().map(|&(r, _)| (r, (-1.2 * r).exp())).collect();
    assert!(bound_check_samples(&ok, 1.0).passed);
}

#[test]
fn rearrangement_examples() {
    let th = FieldParams::thermal(1.0, 2.0);
    let one = ClusterScan::spatial(vec![2, 2], th, vec![0.7], [1.0, 0.0, 0.0], vec![1.0]);
    let rep = kms_rearrangement_check(&one, 1.0, 1e-6).unwrap();
    assert!(rep.passed, "{rep:?}");
    let sym = ClusterScan::spatial(vec![4, 4], th, vec![1.0], [1.0, 0.0, 0.0], vec![0.5]);
    assert!(kms_rearrangement_check(&sym, 0.5, 1e-10).unwrap().passed);
    let tri = ClusterScan::spatial(vec![2, 2, 2], th, vec![0.5, 1.2], [0.6, 0.8, 0.0], vec![1.3])
        .with_directions(vec![[0.6, 0.8, 0.0], [0.0, 0.0, 1.0]]);
    let rep = kms_rearrangement_check(&tri, 1.3, 1e-6).unwrap();
    assert_eq!(rep.rotated.len(), 2);
    assert!(rep.passed, "{rep:?}");
    let mixed = ClusterScan::spatial(vec![3, 2, 1], th, vec![0.4, 1.5], [0.0, 1.0, 0.0], vec![0.8]);
    assert!(kms_rearrangement_check(&mixed, 0.8, 1e-6).unwrap().passed);
}

#[test]
fn invalid_scans() {
    let th = FieldParams::thermal(1.0, 1.0);
    let bad_u = ClusterScan::spatial(vec![2, 2], th, vec![1.2], [1.0, 0.0, 0.0], vec![1.0]);
    assert!(cluster_function(&bad_u, 1.0).is_err());
    let unsorted = ClusterScan::spatial(vec![2, 2, 2], th, vec![0.6, 0.3], [1.0, 0.0, 0.0], vec![1.0]);
    assert!(cluster_function(&unsorted, 1.0).is_err());
    let radii = ClusterScan::spatial(vec![2, 2], th, vec![0.5], [1.0, 0.0, 0.0], vec![2.0, 1.0]);
    assert!(scan(&radii).is_err());
    let ray = ClusterScan::imaginary_time_ray(vec![2, 2], th, vec![0.5], vec![1.0]);
    assert!(scan(&ray).is_err());
    let massless = ClusterScan::spatial(vec![2, 2], FieldParams::vacuum(0.0), vec![0.5], [1.0, 0.0, 0.0], vec![1.0]);
    assert!(scan(&massless).is_err());
    assert!(kms_rearrangement_check(&ClusterScan::spatial(vec![2, 2], FieldParams::vacuum(1.0), vec![0.5], [1.0, 0.0, 0.0], vec![1.0]), 1.0, 1e-6).is_err());
}

#[test]
fn point_source_reproduces_closed_form() {
    let cfg = QuadratureConfig::default();
    let vac = FieldParams::vacuum(1.0);
    for (u, x) in [(0.5, [0.0, 0.0, 0.0]), (1.0, [2.0, 0.0, 0.0]), (3.0, [1.0, 2.0, 2.0])] {
        let i = mass_shell_integral(&Bump::point(), 1.0, u, x, 0.0, &cfg).unwrap().value;
        let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
        let d = vac_two_point(&ComplexTimeDisplacement::imaginary(u, r), &vac).unwrap();
        let want = d * (2.0 * PI).powi(3);
        assert!((i - want).norm() < 1e-10 * want.norm(), "{u} {x:?}: {i} vs {want}");
    }
}

#[test]
fn shrinking_bump_approaches_point_source() {
    let cfg = QuadratureConfig::default();
    let point = mass_shell_integral(&Bump::point(), 1.0, 2.0, [1.0, 0.0, 0.0], 0.0, &cfg).unwrap().value;
    let mut prev = f64::INFINITY;
    for radius in [0.4, 0.2, 0.1, 0.05] {
        let b = Bump::smooth(radius, radius).unwrap();
        assert!((b.transform(0.0) - 1.0).abs() < 1e-12);
        let v = mass_shell_integral(&b, 1.0, 2.0, [1.0, 0.0, 0.0], 0.0, &cfg).unwrap().value;
        let gap = (v - point).norm() / point.norm();
        assert!(gap < prev);
        prev = gap;
    }
    assert!(prev < 1e-3);
}

#[test]
fn extra_damping_is_monotone_and_bounded() {
    let cfg = QuadratureConfig::default();
    let bump = Bump::smooth(1.0, 0.5).unwrap();
    let base = mass_shell_integral(&bump, 1.0, 1.5, [1.0, 1.0, 0.0], 0.0, &cfg).unwrap().value.norm();
    let mut prev = base;
    for b in [0.5, 1.0, 2.0, 4.0, 8.0] {
        let v = mass_shell_integral(&bump, 1.0, 1.5, [1.0, 1.0, 0.0], b, &cfg).unwrap().value.norm();
        assert!(v < prev);
        assert!(v <= (-b).exp() * base * (1.0 + 1e-12) + 1e-300);
        prev = v;
    }
}

#[test]
fn smooth_bump_decays_at_the_mass() {
    let cfg = QuadratureConfig::default();
    let bump = Bump::smooth(1.0, 0.5).unwrap();
    let alpha: f64 = 0.6;
    let samples: Vec<ScanSample> = radii(3.0, 8.0, 11)
        .into_iter()
        .map(|r| {
            let x = [r * alpha.cos(), 0.0, 0.0];
            let v = mass_shell_integral(&bump, 1.0, r * alpha.sin(), x, 0.0, &cfg).unwrap().value;
            ScanSample { r, r_e: r, u: [r * alpha.sin(), 0.0, 0.0, 0.0], value: v }
        })
        .collect();
    let fit = decay_fit(&samples, &FitOptions::window(3.0, 8.0)).unwrap();
    assert!(fit.rate >= 0.95, "rate {}", fit.rate);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn rearrangement_holds_for_random_pairs(u in 0.05f64..1.95, r in 0.2f64..4.0, a in 1u32..5) {
        let th = FieldParams::thermal(1.0, 2.0);
        let s = ClusterScan::spatial(vec![a, a], th, vec![u], [0.0, 1.0, 0.0], vec![r]);
        let rep = kms_rearrangement_check(&s, r, 1e-8).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
    }
}
