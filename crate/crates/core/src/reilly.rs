//! Reilly-type upper bounds for the first eigenvalue of the drift Laplacian
//! and the diagnostics of their equality case.
//!
//! For a closed surface in R³ with density `e^ψ`,
//! `λ₁ ≤ ∫ |H⃗_ψ + ∇̄ψ|² μ_ψ / (n V_ψ)` with `n = 2`. On the round sphere
//! `S^{n+1}(R)` the bound gains the term `n/R²`.

use nalgebra::{Matrix2, Vector2, Vector3};
use rustfft::{num_complex::Complex, FftPlanner};
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{
    center_of_psi_mass, surface_geometry, GeometryError, HalfSquare, ProfileCurve, RadialDensity, WeightedMeasure,
};
use crate::shrinker::{shrinker_residual, ShrinkerResidual};
use crate::spectral::{SpectralError, SpectrumReport, SturmOperator};

/// Dimension of the surfaces of revolution in R³.
pub const SURFACE_DIM: f64 = 2.0;

#[derive(Debug, Error)]
pub enum ReillyError {
    #[error("invalid radius: need 0 < r <= R, got r = {r}, R = {big_r}")]
    InvalidRadius { r: f64, big_r: f64 },
    #[error("invalid dimension {0}: sampled curves on the sphere have n = 1")]
    InvalidDimension(usize),
    #[error("sample {index} is off the sphere by {deviation:e}")]
    NotOnSphere { index: usize, deviation: f64 },
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// `∫ |H⃗_ψ + ∇̄ψ|² μ_ψ / (n V_ψ)`.
pub fn euclidean_bound(curve: &ProfileCurve, density: &RadialDensity) -> Result<f64, ReillyError> {
    let geom = surface_geometry(curve, density)?;
    let measure = WeightedMeasure::new(curve, density)?;
    let sq: Vec<f64> = geom.nodes.iter().map(|n| n.bound_integrand_vector().norm_squared()).collect();
    Ok(measure.average(&sq) / SURFACE_DIM)
}

/// `|n V_ψ + ∫ ⟨H⃗_ψ + ∇̄ψ, F − p⟩ μ_ψ| / (n V_ψ)`.
///
/// The `θ` integral is exact: the horizontal components of `p` integrate to
/// zero against the rotation-invariant field.
pub fn minkowski_identity_residual(
    curve: &ProfileCurve,
    density: &RadialDensity,
    p: &Vector3<f64>,
) -> Result<f64, ReillyError> {
    let geom = surface_geometry(curve, density)?;
    let measure = WeightedMeasure::new(curve, density)?;
    let pairing: Vec<f64> = geom
        .nodes
        .iter()
        .map(|n| {
            let v = n.bound_integrand_vector();
            v.x * n.position.x + v.y * (n.position.y - p.z)
        })
        .collect();
    Ok((SURFACE_DIM + measure.average(&pairing)).abs() / SURFACE_DIM)
}

/// `C² ∫ r_p² μ_ψ / (n V_ψ)`, the value of the bound on a shrinker.
pub fn shrinker_bound_form(curve: &ProfileCurve, density: &RadialDensity, p: &Vector3<f64>) -> Result<f64, ReillyError> {
    let c = density.gaussian_c().ok_or(SpectralError::NotGaussian)?;
    let measure = WeightedMeasure::new(curve, density)?;
    let r2: Vec<f64> = (0..curve.len())
        .map(|i| curve.rho()[i].powi(2) + p.x * p.x + p.y * p.y + (curve.z()[i] - p.z).powi(2))
        .collect();
    Ok(c * c * measure.average(&r2) / SURFACE_DIM)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EqualityOptions {
    /// Relative gap below which the bound is considered attained.
    pub equality_tol: f64,
    pub gaussian_misfit_tol: f64,
    pub shrinker_residual_tol: f64,
    /// Relative tolerance for `λ₁ = −Ĉ`.
    pub lambda_tol: f64,
}

impl Default for EqualityOptions {
    fn default() -> Self {
        Self { equality_tol: 5e-3, gaussian_misfit_tol: 1e-8, shrinker_residual_tol: 1e-3, lambda_tol: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct GaussianFit {
    pub a: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// `max |ψ − a − (C/2) r_p²|` over the nodes.
    pub misfit: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EqualityDiagnostics {
    pub center: Vector3<f64>,
    pub gaussian_fit: GaussianFit,
    /// Shrinker residual for `H⃗ = Ĉ_fit (F − p)^⊥` with the fitted Gaussian constant.
    pub shrinker: ShrinkerResidual,
    /// Gaussian restriction and shrinker equation both hold within tolerance.
    pub necessary_conditions_hold: bool,
    /// `|λ₁ + Ĉ| ≤ tol · |Ĉ|`, evaluated only when the equality flag is set.
    pub lambda1_matches_fitted_c: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReillyReport {
    pub bound: f64,
    pub lambda1: f64,
    pub relative_gap: f64,
    pub equality: bool,
    /// `λ₁ ≤ bound (1 + equality_tol)`.
    pub inequality_holds: bool,
    pub options: EqualityOptions,
    pub diagnostics: EqualityDiagnostics,
}

/// Least-squares fit of `ψ` on the nodes against `a + (c/2) r_p²`.
pub fn fit_gaussian(curve: &ProfileCurve, density: &RadialDensity, p: &Vector3<f64>) -> GaussianFit {
    let rows: Vec<(f64, f64)> = (0..curve.len())
        .map(|i| {
            let x = Vector3::new(curve.rho()[i], 0.0, curve.z()[i]);
            let r2 = curve.rho()[i].powi(2) + p.x * p.x + p.y * p.y + (curve.z()[i] - p.z).powi(2);
            (0.5 * r2, density.psi(&x))
        })
        .collect();
    let mut ata = Matrix2::zeros();
    let mut atb = Vector2::zeros();
    for &(t, psi) in &rows {
        let row = Vector2::new(1.0, t);
        ata += row * row.transpose();
        atb += row * psi;
    }
    let sol = ata.lu().solve(&atb).unwrap_or_else(|| Vector2::new(rows.iter().map(|r| r.1).sum::<f64>() / rows.len() as f64, 0.0));
    let misfit = rows.iter().map(|&(t, psi)| (psi - sol.x - sol.y * t).abs()).fold(0.0, f64::max);
    GaussianFit { a: sol.x, c: sol.y, misfit }
}

/// Compares the bound to `λ₁` and evaluates the necessary conditions for
/// equality: `ψ` restricted to the surface is Gaussian about the center of
/// ψ-mass, the surface is a shrinker for the fitted constant, and then
/// `λ₁ = −Ĉ`. Sufficiency of these conditions is not claimed.
pub fn verify_equality_case(
    curve: &ProfileCurve,
    density: &RadialDensity,
    spectrum: &SpectrumReport,
    options: &EqualityOptions,
) -> Result<ReillyReport, ReillyError> {
    let bound = euclidean_bound(curve, density)?;
    let lambda1 = spectrum.lambda1;
    let relative_gap = (bound - lambda1).abs() / lambda1;
    let equality = relative_gap < options.equality_tol;
    let center = center_of_psi_mass(curve, density, &HalfSquare)?;
    let gaussian_fit = fit_gaussian(curve, density, &center);
    let shrinker = shrinker_residual(curve, gaussian_fit.c, &center);
    let necessary_conditions_hold = gaussian_fit.misfit < options.gaussian_misfit_tol
        && shrinker.max_residual < options.shrinker_residual_tol;
    let lambda1_matches_fitted_c =
        equality.then(|| (lambda1 + shrinker.fitted_c).abs() <= options.lambda_tol * shrinker.fitted_c.abs());
    Ok(ReillyReport {
        bound,
        lambda1,
        relative_gap,
        equality,
        inequality_holds: lambda1 <= bound * (1.0 + options.equality_tol),
        options: *options,
        diagnostics: EqualityDiagnostics {
            center,
            gaussian_fit,
            shrinker,
            necessary_conditions_hold,
            lambda1_matches_fitted_c,
        },
    })
}

/// Submanifolds of the round sphere `S^{n+1}(R)`.
#[derive(Debug, Clone)]
pub enum SphereSubmanifold {
    /// Parallel `n`-sphere of Euclidean radius `r` with constant density.
    LatitudeParallel { r: f64 },
    /// Closed curve on `S²(R)` (`n = 1`), sampled at uniform parameter values,
    /// carrying the restriction of an ambient density.
    SampledCurve { points: Vec<Vector3<f64>>, density: RadialDensity },
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SphereBound {
    pub n: usize,
    #[serde(rename = "R")]
    pub big_r: f64,
    /// `n/R² + ∫ |H⃗_ψ + ∇ψ|² μ_ψ / (n V_ψ)`.
    pub bound: f64,
    /// `λ₁` of a latitude parallel, `n/r²`.
    pub lambda1: Option<f64>,
}

const MIN_SPHERE_SAMPLES: usize = 8;

/// Reilly bound for submanifolds of the round sphere.
pub fn sphere_ambient_bound(n: usize, big_r: f64, sub: &SphereSubmanifold) -> Result<SphereBound, ReillyError> {
    if n == 0 {
        return Err(ReillyError::InvalidDimension(n));
    }
    let nf = n as f64;
    match sub {
        SphereSubmanifold::LatitudeParallel { r } => {
            let r = *r;
            if !(r > 0.0 && r <= big_r && big_r.is_finite()) {
                return Err(ReillyError::InvalidRadius { r, big_r });
            }
            // |H⃗|² = n² (R² − r²) / (r² R²) on the parallel.
            let h2 = nf * nf * (big_r * big_r - r * r) / (r * r * big_r * big_r);
            Ok(SphereBound { n, big_r, bound: nf / (big_r * big_r) + h2 / nf, lambda1: Some(nf / (r * r)) })
        }
        SphereSubmanifold::SampledCurve { points, density } => {
            if n != 1 {
                return Err(ReillyError::InvalidDimension(n));
            }
            if !(big_r > 0.0 && big_r.is_finite()) {
                return Err(ReillyError::InvalidRadius { r: f64::NAN, big_r });
            }
            if points.len() < MIN_SPHERE_SAMPLES {
                return Err(ReillyError::TooFewSamples { got: points.len(), min: MIN_SPHERE_SAMPLES });
            }
            for (index, x) in points.iter().enumerate() {
                let deviation = (x.norm() - big_r).abs();
                if deviation > 1e-8 * big_r {
                    return Err(ReillyError::NotOnSphere { index, deviation });
                }
            }
            let bound = sampled_curve_bound(points, density, big_r)?;
            Ok(SphereBound { n, big_r, bound, lambda1: None })
        }
    }
}

/// Spectral derivatives of periodic samples over a unit parameter period.
fn spectral_derivatives(values: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = values.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);
    let mut spec: Vec<Complex<f64>> = values.iter().map(|v| Complex::new(*v, 0.0)).collect();
    fwd.process(&mut spec);
    let wave = |i: usize| -> f64 {
        let k = if i <= m / 2 { i as f64 } else { i as f64 - m as f64 };
        std::f64::consts::TAU * k
    };
    let mut d1 = spec.clone();
    let mut d2 = spec;
    for i in 0..m {
        let w = wave(i);
        let nyquist = m.is_multiple_of(2) && i == m / 2;
        d1[i] = if nyquist { Complex::new(0.0, 0.0) } else { d1[i] * Complex::new(0.0, w) };
        d2[i] *= -w * w;
    }
    inv.process(&mut d1);
    inv.process(&mut d2);
    let scale = 1.0 / m as f64;
    (d1.iter().map(|c| c.re * scale).collect(), d2.iter().map(|c| c.re * scale).collect())
}

fn sampled_curve_bound(points: &[Vector3<f64>], density: &RadialDensity, big_r: f64) -> Result<f64, ReillyError> {
    let m = points.len();
    let mut d1 = vec![Vector3::zeros(); m];
    let mut d2 = vec![Vector3::zeros(); m];
    for c in 0..3 {
        let (a, b) = spectral_derivatives(&points.iter().map(|x| x[c]).collect::<Vec<_>>());
        for i in 0..m {
            d1[i][c] = a[i];
            d2[i][c] = b[i];
        }
    }
    let shape_min = points.iter().map(|x| density.shape(x)).fold(f64::INFINITY, f64::min);
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..m {
        let x = &points[i];
        let speed = d1[i].norm();
        let t = d1[i] / speed;
        let kappa = (d2[i] - t * d2[i].dot(&t)) / (speed * speed);
        // Geodesic curvature vector: the R³ curvature minus its normal part −x/R².
        let h = kappa + x / (big_r * big_r);
        let g = density.grad(x).dot(&t);
        let w = (density.shape(x) - shape_min).exp() * speed;
        num += (h.norm_squared() + g * g) * w;
        den += w;
    }
    Ok(1.0 / (big_r * big_r) + num / den)
}

/// `λ₁` of a closed curve of length `L` with constant density, from the
/// discrete Sturm–Liouville solver on `n` nodes.
pub fn circle_lambda1_numeric(length: f64, n: usize) -> Result<f64, ReillyError> {
    let op = SturmOperator::from_tables(vec![1.0; n], vec![0.0; n], length)?;
    let ms = crate::spectral::solve_modes(&op, 1, crate::exec::Execution::Sequential)?;
    Ok(ms.eigenvalues[1])
}
