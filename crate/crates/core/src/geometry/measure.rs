use nalgebra::Vector3;
use serde::Serialize;
use std::f64::consts::TAU;

use super::surface::require_axial;
use super::{GeometryError, ProfileCurve, RadialDensity};

/// Discrete weighted measure on the profile curve and its revolution surface.
///
/// The curve weight `p = ρ e^ψ` (the density of `dv_{ln ρ + ψ}`) is stored
/// as its gauge-free part `ρ e^{ψ - a}`; the factor `e^a` is applied only
/// where an absolute volume is requested.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedMeasure {
    gauge: f64,
    spacing: f64,
    shape_weights: Vec<f64>,
    /// Trapezoid end factors (all ones on closed curves).
    trapezoid: Vec<f64>,
}

impl WeightedMeasure {
    pub fn new(curve: &ProfileCurve, density: &RadialDensity) -> Result<Self, GeometryError> {
        require_axial(density)?;
        let n = curve.len();
        let shape_weights = (0..n)
            .map(|i| {
                let x = Vector3::new(curve.rho()[i], 0.0, curve.z()[i]);
                density.shape_weight(&x).map(|w| curve.rho()[i] * w)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let mut trapezoid = vec![1.0; n];
        if !curve.is_closed() {
            trapezoid[0] = 0.5;
            trapezoid[n - 1] = 0.5;
        }
        Ok(Self { gauge: density.gauge(), spacing: curve.spacing(), shape_weights, trapezoid })
    }

    pub fn gauge(&self) -> f64 {
        self.gauge
    }

    pub fn len(&self) -> usize {
        self.shape_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape_weights.is_empty()
    }

    /// `ρ_i e^{ψ_i - a}`.
    pub fn shape_weights(&self) -> &[f64] {
        &self.shape_weights
    }

    /// `p_i = ρ_i e^{ψ_i}`.
    pub fn curve_weight(&self, i: usize) -> f64 {
        self.gauge.exp() * self.shape_weights[i]
    }

    /// Quadrature weight of node `i` for `μ_ψ` on the surface.
    pub fn surface_weight(&self, i: usize) -> f64 {
        TAU * self.spacing * self.trapezoid[i] * self.curve_weight(i)
    }

    /// Gauge-free surface weights, proportional to [`Self::surface_weight`].
    pub fn relative_weights(&self) -> Vec<f64> {
        self.shape_weights.iter().zip(&self.trapezoid).map(|(w, t)| TAU * self.spacing * t * w).collect()
    }

    /// `V_ψ`.
    pub fn total(&self) -> f64 {
        self.gauge.exp() * self.relative_weights().iter().sum::<f64>()
    }

    /// `∫ f μ_ψ / V_ψ` for a θ-independent integrand given per node.
    pub fn average(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        let w = self.relative_weights();
        let num: f64 = w.iter().zip(values).map(|(a, b)| a * b).sum();
        num / w.iter().sum::<f64>()
    }

    /// `∫ f μ_ψ` for a θ-independent integrand given per node.
    pub fn integrate(&self, values: &[f64]) -> f64 {
        assert_eq!(values.len(), self.len());
        (0..self.len()).map(|i| self.surface_weight(i) * values[i]).sum()
    }
}

/// `V_ψ` of the revolution surface.
pub fn weighted_volume(curve: &ProfileCurve, density: &RadialDensity) -> Result<f64, GeometryError> {
    Ok(WeightedMeasure::new(curve, density)?.total())
}
