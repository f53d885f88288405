//! Curvatures of the revolution surface generated by a [`ProfileCurve`].
//!
//! All vectors live in the meridian half-plane `θ = 0`, written as
//! `(ρ, z)` components. Rotational symmetry carries them to any other
//! meridian, and for an axial density `∇̄ψ` has no `θ` component.
//!
//! Sign convention: `ν = (−sin α, cos α)` is the left normal of the profile
//! and `H⃗ = (κ_prof + κ_rot) ν` with `κ_prof = α'` and `κ_rot = sin α / ρ`.
//! On a round sphere this makes `H⃗` point to the center with `|H⃗| = 2/R`,
//! independently of the traversal direction.

use nalgebra::{Vector2, Vector3};
use serde::Serialize;

use super::{GeometryError, ProfileCurve, RadialDensity};

#[derive(Debug, Clone, Serialize)]
pub struct NodeGeometry {
    pub position: Vector2<f64>,
    pub tangent: Vector2<f64>,
    pub normal: Vector2<f64>,
    pub kappa_profile: f64,
    pub kappa_rotation: f64,
    /// `H⃗`.
    pub mean_curvature: Vector2<f64>,
    /// `∇̄ψ` restricted to the meridian plane.
    pub grad_psi: Vector2<f64>,
    /// `H⃗_ψ = H⃗ − (∇̄ψ)^⊥`.
    pub weighted_mean_curvature: Vector2<f64>,
}

impl NodeGeometry {
    /// Scalar mean curvature `⟨H⃗, ν⟩`.
    pub fn mean_curvature_scalar(&self) -> f64 {
        self.kappa_profile + self.kappa_rotation
    }

    /// `(∇̄ψ)^⊥`.
    pub fn normal_grad_psi(&self) -> Vector2<f64> {
        self.normal * self.grad_psi.dot(&self.normal)
    }

    /// `(∇̄ψ)^⊤`.
    pub fn tangential_grad_psi(&self) -> Vector2<f64> {
        self.tangent * self.grad_psi.dot(&self.tangent)
    }

    /// `H⃗_ψ + ∇̄ψ = H⃗ + (∇̄ψ)^⊤`.
    pub fn bound_integrand_vector(&self) -> Vector2<f64> {
        self.weighted_mean_curvature + self.grad_psi
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SurfaceGeometry {
    pub nodes: Vec<NodeGeometry>,
}

impl SurfaceGeometry {
    pub fn max_weighted_mean_curvature(&self) -> f64 {
        self.nodes.iter().map(|n| n.weighted_mean_curvature.norm()).fold(0.0, f64::max)
    }
}

/// Mean curvature of a revolution surface along `ν = (−sin α, cos α)`.
#[inline]
pub fn revolution_mean_curvature(rho: f64, alpha: f64, alpha_prime: f64) -> f64 {
    alpha_prime + alpha.sin() / rho
}

/// `dα/ds`: fourth-order central differences on closed curves, second
/// order (one-sided at the ends) on open ones.
pub fn profile_curvature(curve: &ProfileCurve) -> Vec<f64> {
    let n = curve.len();
    let h = curve.spacing();
    let a = curve.alpha();
    (0..n)
        .map(|i| {
            if curve.is_closed() {
                let t = |k: isize| curve.turning((i as isize + k).rem_euclid(n as isize) as usize);
                let near = t(-1) + t(0);
                let far = t(-2) + near + t(1);
                (8.0 * near - far) / (12.0 * h)
            } else if i == 0 {
                (-3.0 * a[0] + 4.0 * a[1] - a[2]) / (2.0 * h)
            } else if i == n - 1 {
                (3.0 * a[n - 1] - 4.0 * a[n - 2] + a[n - 3]) / (2.0 * h)
            } else {
                (a[i + 1] - a[i - 1]) / (2.0 * h)
            }
        })
        .collect()
}

pub(crate) fn require_axial(density: &RadialDensity) -> Result<(), GeometryError> {
    if density.is_axial() {
        Ok(())
    } else {
        Err(GeometryError::OffAxisDensity)
    }
}

pub fn surface_geometry(curve: &ProfileCurve, density: &RadialDensity) -> Result<SurfaceGeometry, GeometryError> {
    require_axial(density)?;
    let kappa = profile_curvature(curve);
    let nodes = (0..curve.len())
        .map(|i| {
            let (rho, z, alpha) = (curve.rho()[i], curve.z()[i], curve.alpha()[i]);
            let tangent = Vector2::new(alpha.cos(), alpha.sin());
            let normal = Vector2::new(-alpha.sin(), alpha.cos());
            let kappa_rotation = alpha.sin() / rho;
            let mean_curvature = normal * (kappa[i] + kappa_rotation);
            let g = density.grad(&Vector3::new(rho, 0.0, z));
            let grad_psi = Vector2::new(g.x, g.z);
            let weighted_mean_curvature = mean_curvature - normal * grad_psi.dot(&normal);
            NodeGeometry {
                position: Vector2::new(rho, z),
                tangent,
                normal,
                kappa_profile: kappa[i],
                kappa_rotation,
                mean_curvature,
                grad_psi,
                weighted_mean_curvature,
            }
        })
        .collect();
    Ok(SurfaceGeometry { nodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn round_torus_outer_equator() {
        let c = ProfileCurve::round_torus(2.0, 1.0, 256).unwrap();
        let g = surface_geometry(&c, &RadialDensity::constant(0.0)).unwrap();
        let outer = &g.nodes[0];
        assert!((outer.mean_curvature.norm() - 4.0 / 3.0).abs() < 1e-10);
        // Points toward the tube center and the axis.
        assert!(outer.mean_curvature.x < 0.0);
    }

    #[test]
    fn constant_density_leaves_mean_curvature_unchanged() {
        let c = ProfileCurve::round_torus(3.0, 0.5, 128).unwrap();
        let g = surface_geometry(&c, &RadialDensity::constant(4.0)).unwrap();
        for n in &g.nodes {
            assert_eq!(n.weighted_mean_curvature, n.mean_curvature);
            assert!(n.normal.dot(&n.tangent).abs() < 1e-10);
        }
    }

    #[test]
    fn sphere_calibration_both_orientations() {
        // Open meridian of the sphere of radius R, kept away from the axis.
        let r = 1.7;
        let n = 401;
        let (t0, t1) = (-1.4, 1.4);
        for dir in [1.0, -1.0] {
            let mut rho = vec![];
            let mut z = vec![];
            let mut alpha = vec![];
            for i in 0..n {
                let t = dir * (t0 + (t1 - t0) * i as f64 / (n - 1) as f64);
                rho.push(r * t.cos());
                z.push(r * t.sin());
                alpha.push(t + dir * FRAC_PI_2);
            }
            let c = ProfileCurve::new(rho, z, alpha, r * (t1 - t0), false).unwrap();
            let g = surface_geometry(&c, &RadialDensity::constant(0.0)).unwrap();
            for node in &g.nodes {
                assert!((node.mean_curvature.norm() - 2.0 / r).abs() < 1e-6);
                // Inward: H⃗ antiparallel to the position vector.
                assert!(node.mean_curvature.dot(&node.position) < 0.0);
            }
        }
    }
}
