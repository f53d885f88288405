mod common;

use std::f64::consts::{PI, TAU};

use common::{adaptive_simpson, gaussian, shot_torus_1024};
use nalgebra::Vector3;
use shrinkspec::geometry::{
    center_of_psi_mass, coordinate_fields, descend_center, psi_barycenter, resample_arclength, surface_geometry,
    weighted_volume, DescentOptions, FnPotential, GeometryError, HalfSquare, ProfileCurve, RadialDensity,
    WeightedMeasure,
};

fn closed_polyline(m: usize, f: impl Fn(f64) -> (f64, f64)) -> Vec<(f64, f64)> {
    let mut pts: Vec<_> = (0..m).map(|i| f(TAU * i as f64 / m as f64)).collect();
    pts.push(pts[0]);
    pts
}

fn assert_unit_speed(c: &ProfileCurve) {
    let n = c.len();
    let h = c.spacing();
    for i in 0..n {
        let j = (i + 1) % n;
        let chord = (c.rho()[j] - c.rho()[i]).hypot(c.z()[j] - c.z()[i]);
        // Chord of a unit-speed arc is shorter by h³κ²/24.
        assert!((chord / h - 1.0).abs() < 1e-3, "node {i}: {}", chord / h);
    }
}

#[test]
fn resampled_circle_has_length_two_pi() {
    let c = resample_arclength(&closed_polyline(1024, |u| (2.0 + u.cos(), u.sin())), 256).unwrap();
    assert!((c.length() - TAU).abs() < 1e-6, "{}", c.length());
    assert_unit_speed(&c);
    assert!(c.is_symmetric_z());
}

#[test]
fn resampled_ellipse_length_matches_adaptive_quadrature() {
    let oracle = adaptive_simpson(&|u: f64| u.sin().hypot(2.0 * u.cos()), 0.0, TAU, 1e-13);
    let c = resample_arclength(&closed_polyline(1024, |u| (2.0 + u.cos(), 2.0 * u.sin())), 512).unwrap();
    assert!((c.length() - oracle).abs() < 1e-8, "{} vs {oracle}", c.length());
    assert_unit_speed(&c);
}

#[test]
fn resample_rejects_bad_polylines() {
    let mut pts = closed_polyline(64, |u| (0.5 + u.cos(), u.sin()));
    assert!(matches!(resample_arclength(&pts, 64), Err(GeometryError::NonPositiveRadius { .. })));
    pts = closed_polyline(64, |u| (2.0 + u.cos(), u.sin()));
    pts.pop();
    assert!(matches!(resample_arclength(&pts, 64), Err(GeometryError::OpenCurve { .. })));
}

#[test]
fn round_torus_outer_equator_mean_curvature() {
    let c = ProfileCurve::round_torus(2.0, 1.0, 256).unwrap();
    let g = surface_geometry(&c, &RadialDensity::constant(0.0)).unwrap();
    let outer = (0..c.len()).max_by(|&a, &b| c.rho()[a].total_cmp(&c.rho()[b])).unwrap();
    assert!((g.nodes[outer].mean_curvature.norm() - 4.0 / 3.0).abs() < 1e-8);
    for (i, n) in g.nodes.iter().enumerate() {
        assert!(n.normal.dot(&n.tangent).abs() < 1e-10);
        assert_eq!(n.weighted_mean_curvature, n.mean_curvature, "node {i}");
    }
}

#[test]
fn shrinker_torus_has_vanishing_weighted_mean_curvature() {
    let shot = shot_torus_1024();
    let g = surface_geometry(&shot.curve, &gaussian(-1.0)).unwrap();
    let m = g.max_weighted_mean_curvature();
    assert!(m < 1e-3, "{m}");
}

#[test]
fn round_torus_area() {
    let c = ProfileCurve::round_torus(2.0, 1.0, 128).unwrap();
    let v = weighted_volume(&c, &RadialDensity::constant(0.0)).unwrap();
    assert!((v - 4.0 * PI * PI * 2.0).abs() < 1e-10);
    let va = weighted_volume(&c, &RadialDensity::constant(0.7)).unwrap();
    assert!((va / v - 0.7f64.exp()).abs() < 1e-12);
}

#[test]
fn gaussian_weighted_volume_matches_adaptive_quadrature() {
    let oracle = TAU
        * adaptive_simpson(
            &|u: f64| {
                let (rho, z) = (2.0 + u.cos(), u.sin());
                rho * (-0.5 * (rho * rho + z * z)).exp()
            },
            0.0,
            TAU,
            1e-14,
        );
    let c = ProfileCurve::round_torus(2.0, 1.0, 256).unwrap();
    let v = weighted_volume(&c, &gaussian(-1.0)).unwrap();
    assert!((v - oracle).abs() < 1e-8, "{v} vs {oracle}");
}

#[test]
fn descent_agrees_with_closed_form_barycenter() {
    let c = ProfileCurve::round_torus(2.0, 1.0, 256).unwrap().translated_z(0.4).unwrap();
    let d = RadialDensity::gaussian(0.0, -0.3, Vector3::new(0.0, 0.0, -0.5));
    let bary = psi_barycenter(&c, &d).unwrap();
    let opts = DescentOptions { gradient_tol: 1e-12, ..DescentOptions::default() };
    let got = descend_center(&c, &d, &HalfSquare, Vector3::new(0.3, -0.2, 1.5), &opts).unwrap();
    assert!((got.center - bary).norm() < 1e-8, "{} vs {}", got.center, bary);
    assert_eq!(center_of_psi_mass(&c, &d, &HalfSquare).unwrap(), bary);
}

#[test]
fn convex_center_of_symmetric_torus_is_origin() {
    let c = ProfileCurve::round_torus(2.0, 1.0, 128).unwrap();
    let quartic = FnPotential { f: |t: f64| t.powi(4) / 4.0, df: |t: f64| t.powi(3) };
    let p = center_of_psi_mass(&c, &gaussian(-1.0), &quartic).unwrap();
    assert!(p.norm() < 1e-8, "{p}");
}

#[test]
fn first_moments_vanish_at_the_center() {
    let c = ProfileCurve::round_torus(2.0, 1.0, 256).unwrap().translated_z(-0.7).unwrap();
    let d = gaussian(-0.5);
    let p = psi_barycenter(&c, &d).unwrap();
    let m = WeightedMeasure::new(&c, &d).unwrap();
    let moments = coordinate_fields(&c, &p).first_moments(&m);
    assert!(moments.norm() < 1e-12, "{moments}");
}

#[test]
fn z_field_of_symmetric_profile_changes_sign_twice() {
    let shot = shot_torus_1024();
    let f = coordinate_fields(&shot.curve, &Vector3::zeros());
    let n = f.z.len();
    let changes = (0..n).filter(|&i| (f.z[i] < 0.0) != (f.z[(i + 1) % n] < 0.0)).count();
    assert_eq!(changes, 2);
}

#[test]
fn coordinate_field_at_a_node() {
    let c = ProfileCurve::round_torus(1.5, 0.5, 64).unwrap().translated_z(1.0).unwrap();
    let f = coordinate_fields(&c, &Vector3::zeros());
    // Node 0 sits at (ρ, z) = (2, 1).
    assert_eq!(f.at(0, 0.0), Vector3::new(2.0, 0.0, 1.0));
    assert_eq!(f.r_squared(0, 0.0), 5.0);
}
