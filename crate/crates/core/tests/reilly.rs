mod common;

use std::f64::consts::TAU;

use common::{adaptive_simpson, gaussian, rel, shot_torus_1024};
use nalgebra::Vector3;
use shrinkspec::geometry::{ProfileCurve, RadialDensity};
use shrinkspec::reilly::{
    circle_lambda1_numeric, euclidean_bound, minkowski_identity_residual, shrinker_bound_form, sphere_ambient_bound,
    verify_equality_case, EqualityOptions, ReillyError, SphereSubmanifold,
};
use shrinkspec::shrinker::sphere_meridian;
use shrinkspec::spectral::{assemble_spectrum, solve_all_modes};
use shrinkspec::Execution;

fn lambda1(curve: &ProfileCurve, density: &RadialDensity) -> shrinkspec::spectral::SpectrumReport {
    let modes = solve_all_modes(curve, density, 8, 10, Execution::default()).unwrap();
    assemble_spectrum(&modes, 1e-9).unwrap()
}

#[test]
fn round_torus_bound_matches_quadrature_oracle() {
    let (r0, r) = (2.0, 1.0);
    let h = |u: f64| 1.0 / r + u.cos() / (r0 + r * u.cos());
    let num = adaptive_simpson(&|u: f64| h(u).powi(2) * (r0 + r * u.cos()), 0.0, TAU, 1e-14);
    let den = adaptive_simpson(&|u: f64| r0 + r * u.cos(), 0.0, TAU, 1e-14);
    let oracle = num / (2.0 * den);
    let curve = ProfileCurve::round_torus(r0, r, 1024).unwrap();
    let density = RadialDensity::constant(0.0);
    let bound = euclidean_bound(&curve, &density).unwrap();
    assert!(rel(bound, oracle) < 1e-8, "{bound} vs {oracle}");
    assert!(lambda1(&curve, &density).lambda1 < bound);
}

#[test]
fn shrinking_sphere_bound_is_minus_c() {
    for c in [-1.0, -0.5, -2.0] {
        let meridian = sphere_meridian(c, 256, 1.2).unwrap();
        let bound = euclidean_bound(&meridian, &gaussian(c)).unwrap();
        assert!(rel(bound, -c) < 1e-8, "C = {c}: {bound}");
    }
}

#[test]
fn inequality_holds_across_corpus() {
    let shot = shot_torus_1024();
    let corpus = [
        (ProfileCurve::round_torus(2.0, 1.0, 512).unwrap(), RadialDensity::constant(0.0)),
        (ProfileCurve::round_torus(3.0, 0.5, 512).unwrap(), RadialDensity::constant(0.0)),
        (ProfileCurve::round_torus(2.0, 1.0, 512).unwrap(), gaussian(-1.0)),
        (ProfileCurve::round_torus(1.5, 1.0, 512).unwrap().translated_z(0.3).unwrap(), gaussian(-0.3)),
        (shot.curve.clone(), gaussian(-1.0)),
    ];
    for (curve, density) in &corpus {
        let spectrum = lambda1(curve, density);
        let report = verify_equality_case(curve, density, &spectrum, &EqualityOptions::default()).unwrap();
        assert!(report.inequality_holds, "{report:?}");
        assert!(report.lambda1 <= report.bound * (1.0 + 5e-3));
        if report.equality {
            assert!(report.diagnostics.necessary_conditions_hold, "{report:?}");
            assert_eq!(report.diagnostics.lambda1_matches_fitted_c, Some(true));
        }
    }
}

#[test]
fn shot_torus_attains_equality() {
    let shot = shot_torus_1024();
    let d = gaussian(-1.0);
    let report = verify_equality_case(&shot.curve, &d, &lambda1(&shot.curve, &d), &EqualityOptions::default()).unwrap();
    assert!(report.equality, "{report:?}");
    assert!((report.bound - 1.0).abs() < 1e-3);
    assert!(report.diagnostics.gaussian_fit.misfit < 1e-10);
    assert!((report.diagnostics.gaussian_fit.c + 1.0).abs() < 1e-10);
    assert!(report.diagnostics.center.norm() < 1e-10);
    assert!((shrinker_bound_form(&shot.curve, &d, &Vector3::zeros()).unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn round_torus_does_not_attain_equality() {
    let curve = ProfileCurve::round_torus(2.0, 1.0, 1024).unwrap();
    let d = RadialDensity::constant(0.0);
    let report = verify_equality_case(&curve, &d, &lambda1(&curve, &d), &EqualityOptions::default()).unwrap();
    assert!(!report.equality);
    assert!(report.relative_gap > 10.0 * report.options.equality_tol);
    assert_eq!(report.diagnostics.lambda1_matches_fitted_c, None);
}

#[test]
fn minkowski_identity_holds_for_any_center() {
    let curve = ProfileCurve::round_torus(2.0, 1.0, 2048).unwrap();
    let d = gaussian(-1.0);
    for p in [Vector3::zeros(), Vector3::new(0.0, 0.0, 5.0), Vector3::new(1.0, -2.0, 0.5)] {
        let r = minkowski_identity_residual(&curve, &d, &p).unwrap();
        assert!(r < 1e-6, "{p}: {r}");
    }
}

#[test]
fn bound_is_gauge_invariant_and_scale_covariant() {
    let curve = ProfileCurve::round_torus(2.0, 0.8, 512).unwrap();
    let b0 = euclidean_bound(&curve, &RadialDensity::gaussian_at_origin(0.0, -0.6)).unwrap();
    let b1 = euclidean_bound(&curve, &RadialDensity::gaussian_at_origin(2.5, -0.6)).unwrap();
    assert!(rel(b1, b0) < 1e-12);
    let lam = 1.7;
    let scaled = euclidean_bound(&curve.scaled(lam).unwrap(), &gaussian(-0.6 / (lam * lam))).unwrap();
    assert!(rel(scaled, b0 / (lam * lam)) < 1e-10);
}

#[test]
fn latitude_circles_attain_equality() {
    for r in [0.3, 0.6, 0.9] {
        let b = sphere_ambient_bound(1, 1.0, &SphereSubmanifold::LatitudeParallel { r }).unwrap();
        assert!((b.bound - 1.0 / (r * r)).abs() < 1e-10);
        let numeric = circle_lambda1_numeric(TAU * r, 2048).unwrap();
        assert!((b.bound - numeric).abs() < 1e-10, "r {r}: {}", b.bound - numeric);
    }
}

#[test]
fn great_circle_and_small_circle_limits() {
    let great = sphere_ambient_bound(1, 2.0, &SphereSubmanifold::LatitudeParallel { r: 2.0 }).unwrap();
    assert!((great.bound - 0.25).abs() < 1e-15);
    let mut last = great.bound;
    for r in [1.5, 1.0, 0.5, 0.1, 0.01] {
        let b = sphere_ambient_bound(1, 2.0, &SphereSubmanifold::LatitudeParallel { r }).unwrap().bound;
        assert!(b > last);
        last = b;
    }
    assert!(matches!(
        sphere_ambient_bound(1, 1.0, &SphereSubmanifold::LatitudeParallel { r: 1.5 }),
        Err(ReillyError::InvalidRadius { .. })
    ));
}

#[test]
fn sampled_great_circle_bound() {
    let big_r = 1.5;
    let points: Vec<_> = (0..128)
        .map(|i| {
            let t = TAU * i as f64 / 128.0;
            Vector3::new(big_r * t.cos(), 0.0, big_r * t.sin())
        })
        .collect();
    let b = sphere_ambient_bound(1, big_r, &SphereSubmanifold::SampledCurve { points, density: RadialDensity::constant(0.0) })
        .unwrap();
    assert!(rel(b.bound, 1.0 / (big_r * big_r)) < 1e-10, "{}", b.bound);
}
