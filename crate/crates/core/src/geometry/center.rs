//! Centers of ψ-mass and centered coordinate fields.
//!
//! The f-center of ψ-mass minimizes `p ↦ ∫ f(r_p) μ_ψ`. For `f = t²/2` it
//! is the weighted barycenter. General `f` is handled by gradient descent
//! with Armijo backtracking on the full surface integral, with the θ
//! direction integrated by the periodic trapezoid rule.

use nalgebra::Vector3;
use serde::Serialize;
use std::f64::consts::TAU;

use super::{GeometryError, ProfileCurve, RadialDensity, WeightedMeasure};
use crate::exec::Execution;

/// Convex increasing profile `f` with `f' > 0`, `f'' > 0` on `t > 0`.
pub trait CenterPotential: Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
    /// Whether the closed-form barycenter applies.
    fn is_half_square(&self) -> bool {
        false
    }
}

/// `f(t) = t²/2`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HalfSquare;

impl CenterPotential for HalfSquare {
    fn value(&self, t: f64) -> f64 {
        0.5 * t * t
    }
    fn derivative(&self, t: f64) -> f64 {
        t
    }
    fn is_half_square(&self) -> bool {
        true
    }
}

/// Any `f` given by closures.
pub struct FnPotential<F, D> {
    pub f: F,
    pub df: D,
}

impl<F, D> CenterPotential for FnPotential<F, D>
where
    F: Fn(f64) -> f64 + Sync,
    D: Fn(f64) -> f64 + Sync,
{
    fn value(&self, t: f64) -> f64 {
        (self.f)(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (self.df)(t)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DescentOptions {
    pub max_iterations: usize,
    /// Stop when `|∇𝓕| / V_ψ` drops below this.
    pub gradient_tol: f64,
    /// Meridian samples for the θ integral.
    pub theta_samples: usize,
    pub exec: Execution,
}

impl Default for DescentOptions {
    fn default() -> Self {
        Self { max_iterations: 500, gradient_tol: 1e-10, theta_samples: 64, exec: Execution::default() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CenterDescent {
    pub center: Vector3<f64>,
    pub iterations: usize,
    pub gradient_norm: f64,
}

/// Surface integral `∫ f(r_p) μ_ψ` and its gradient in `p`, both divided by `V_ψ`.
pub fn psi_mass_functional(
    curve: &ProfileCurve,
    measure: &WeightedMeasure,
    potential: &dyn CenterPotential,
    p: &Vector3<f64>,
    theta_samples: usize,
    exec: Execution,
) -> (f64, Vector3<f64>) {
    let w = measure.relative_weights();
    let total: f64 = w.iter().sum();
    let per_node = exec.map_range(curve.len(), |i| {
        let (rho, z) = (curve.rho()[i], curve.z()[i]);
        let mut value = 0.0;
        let mut grad = Vector3::zeros();
        for j in 0..theta_samples {
            let th = TAU * j as f64 / theta_samples as f64;
            let d = Vector3::new(rho * th.cos(), rho * th.sin(), z) - p;
            let r = d.norm();
            value += potential.value(r);
            if r > 0.0 {
                grad -= d * (potential.derivative(r) / r);
            }
        }
        (w[i] * value / theta_samples as f64, grad * (w[i] / theta_samples as f64))
    });
    let mut value = 0.0;
    let mut grad = Vector3::zeros();
    for (v, g) in per_node {
        value += v;
        grad += g;
    }
    (value / total, grad / total)
}

/// Gradient descent with Armijo backtracking from `start`.
pub fn descend_center(
    curve: &ProfileCurve,
    density: &RadialDensity,
    potential: &dyn CenterPotential,
    start: Vector3<f64>,
    opts: &DescentOptions,
) -> Result<CenterDescent, GeometryError> {
    let measure = WeightedMeasure::new(curve, density)?;
    let eval = |p: &Vector3<f64>| psi_mass_functional(curve, &measure, potential, p, opts.theta_samples, opts.exec);
    let mut p = start;
    let (mut value, mut grad) = eval(&p);
    let mut step = 1.0;
    for it in 0..opts.max_iterations {
        let gnorm = grad.norm();
        if gnorm < opts.gradient_tol {
            return Ok(CenterDescent { center: p, iterations: it, gradient_norm: gnorm });
        }
        let mut accepted = false;
        for _ in 0..60 {
            let trial = p - grad * step;
            let (tv, tg) = eval(&trial);
            if tv <= value - 1e-4 * step * gnorm * gnorm {
                p = trial;
                value = tv;
                grad = tg;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // Armijo cannot make progress below rounding level.
            let gnorm = grad.norm();
            if gnorm < 1e3 * opts.gradient_tol {
                return Ok(CenterDescent { center: p, iterations: it, gradient_norm: gnorm });
            }
            return Err(GeometryError::NoConvergence { iterations: it, gradient_norm: gnorm });
        }
        step = (step * 2.0).min(1.0);
    }
    Err(GeometryError::NoConvergence { iterations: opts.max_iterations, gradient_norm: grad.norm() })
}

/// Weighted barycenter `∫ F μ_ψ / V_ψ`, which lies on the rotation axis.
pub fn psi_barycenter(curve: &ProfileCurve, density: &RadialDensity) -> Result<Vector3<f64>, GeometryError> {
    let m = WeightedMeasure::new(curve, density)?;
    Ok(Vector3::new(0.0, 0.0, m.average(curve.z())))
}

/// The f-center of ψ-mass. `f = t²/2` uses the closed form; any other `f`
/// descends from the barycenter.
pub fn center_of_psi_mass(
    curve: &ProfileCurve,
    density: &RadialDensity,
    potential: &dyn CenterPotential,
) -> Result<Vector3<f64>, GeometryError> {
    let bary = psi_barycenter(curve, density)?;
    if potential.is_half_square() {
        return Ok(bary);
    }
    Ok(descend_center(curve, density, potential, bary, &DescentOptions::default())?.center)
}

/// Centered coordinates `x_p = ρ cos θ − p₁`, `y_p = ρ sin θ − p₂`, `z_p = z − p₃`
/// restricted to the surface, with the separated 1-D factors.
#[derive(Debug, Clone)]
pub struct CoordinateFields {
    pub center: Vector3<f64>,
    /// `ρ(s)`.
    pub rho: Vec<f64>,
    /// `z(s) − p₃`.
    pub z: Vec<f64>,
}

impl CoordinateFields {
    pub fn at(&self, i: usize, theta: f64) -> Vector3<f64> {
        let r = self.rho[i];
        Vector3::new(r * theta.cos() - self.center.x, r * theta.sin() - self.center.y, self.z[i])
    }

    pub fn r_squared(&self, i: usize, theta: f64) -> f64 {
        self.at(i, theta).norm_squared()
    }

    /// `∫ x_p μ_ψ` with the θ integral done exactly.
    pub fn first_moments(&self, measure: &WeightedMeasure) -> Vector3<f64> {
        let v = measure.total();
        let zint: f64 = (0..self.z.len()).map(|i| measure.surface_weight(i) * self.z[i]).sum();
        Vector3::new(-self.center.x * v, -self.center.y * v, zint)
    }
}

pub fn coordinate_fields(curve: &ProfileCurve, p: &Vector3<f64>) -> CoordinateFields {
    CoordinateFields { center: *p, rho: curve.rho().to_vec(), z: curve.z().iter().map(|z| z - p.z).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_torus_centers_at_origin() {
        let c = ProfileCurve::round_torus(2.0, 1.0, 256).unwrap();
        let d = RadialDensity::gaussian_at_origin(0.0, -1.0);
        let p = center_of_psi_mass(&c, &d, &HalfSquare).unwrap();
        assert!(p.norm() < 1e-10);
    }

    #[test]
    fn barycenter_translates_with_surface() {
        let c = ProfileCurve::round_torus(2.0, 1.0, 256).unwrap();
        let d = RadialDensity::constant(0.0);
        let moved = c.translated_z(3.0).unwrap();
        let p0 = center_of_psi_mass(&c, &d, &HalfSquare).unwrap();
        let p1 = center_of_psi_mass(&moved, &d, &HalfSquare).unwrap();
        assert!((p1 - p0 - Vector3::new(0.0, 0.0, 3.0)).norm() < 1e-12);
    }

    #[test]
    fn coordinate_field_evaluation() {
        let c = ProfileCurve::round_torus(2.0, 1.0, 64).unwrap();
        let f = coordinate_fields(&c, &Vector3::zeros());
        // Node 16 of 64 is at u = π/2: (ρ, z) = (2, 1).
        assert!((f.at(16, 0.0) - Vector3::new(2.0, 0.0, 1.0)).norm() < 1e-14);
        assert!((f.r_squared(16, 0.0) - 5.0).abs() < 1e-13);
    }
}
