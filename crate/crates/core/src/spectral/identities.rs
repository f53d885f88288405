//! Coordinate eigenfunctions of shrinker tori and the second-solution
//! (Wronskian) check for the `k = 0` ladder.

use serde::Serialize;

use super::operator::SturmOperator;
use super::SpectralError;
use crate::geometry::{ProfileCurve, RadialDensity};
use crate::spline::PeriodicSpline;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoordinateResiduals {
    #[serde(rename = "C")]
    pub c: f64,
    /// `‖A₁ρ + Cρ‖∞ / ‖ρ‖∞` with `A₁ = −L₁`.
    pub rho_residual: f64,
    /// `‖A₀z + Cz‖∞ / ‖z‖∞` with `A₀ = −L₀`.
    pub z_residual: f64,
}

fn relative_residual(op: &SturmOperator, f: &[f64], mu: f64) -> f64 {
    let af = op.apply(f);
    let num = af.iter().zip(f).map(|(a, v)| (a - mu * v).abs()).fold(0.0, f64::max);
    let den = f.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    num / den
}

/// On a shrinker centered at the origin, `ρ` is an eigenfunction of the
/// `k = 1` operator and `z` of the `k = 0` operator, both with eigenvalue `−C`.
pub fn verify_coordinate_eigenfunctions(
    curve: &ProfileCurve,
    density: &RadialDensity,
) -> Result<CoordinateResiduals, SpectralError> {
    let c = density.gaussian_c().ok_or(SpectralError::NotGaussian)?;
    let op1 = SturmOperator::build(curve, density, 1)?;
    let op0 = SturmOperator::build(curve, density, 0)?;
    Ok(CoordinateResiduals {
        c,
        rho_residual: relative_residual(&op1, curve.rho(), -c),
        z_residual: relative_residual(&op0, curve.z(), -c),
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SecondSolution {
    pub mu: f64,
    /// Arc length of the chosen zero of `z`, used as the origin.
    pub origin: f64,
    /// `|ζ(L) − 1|`.
    pub zeta_defect: f64,
    /// `|ζ'(L)|`.
    pub zeta_prime_defect: f64,
    /// `max |p(ζz' − ζ'z) − 1|`.
    pub wronskian_drift: f64,
    /// Periodicity defect of the companion solution `z`: `max(|z(L)|, |p z'(L) − 1|)`.
    pub z_defect: f64,
    /// `max |z_ode − ẑ| / max |ẑ|` against the supplied eigenvector `ẑ`
    /// rescaled to `z'(0) = 1/p(0)`.
    pub z_mismatch: f64,
}

impl SecondSolution {
    pub fn periodicity_defect(&self) -> f64 {
        self.zeta_defect.max(self.zeta_prime_defect)
    }
}

/// Substeps of the RK4 integration per grid interval.
const SUBSTEPS: usize = 8;

fn find_zero(spline: &PeriodicSpline, values: &[f64], h: f64) -> Option<f64> {
    let n = values.len();
    let i = (0..n).find(|&i| values[i] < 0.0 && values[(i + 1) % n] >= 0.0)?;
    let (mut lo, mut hi) = (i as f64 * h, (i + 1) as f64 * h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if spline.value(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Integrates `(pζ')' + μpζ = 0`, `ζ(0) = 1`, `ζ'(0) = 0` together with the
/// companion `z(0) = 0`, `z'(0) = 1/p(0)` over one period, starting at a
/// zero of `z_like` where it changes sign from − to +. The weight is a
/// periodic cubic spline through the grid values.
pub fn second_solution_check(op: &SturmOperator, mu: f64, z_like: &[f64]) -> Result<SecondSolution, SpectralError> {
    let n = op.len();
    if z_like.len() != n {
        return Err(SpectralError::InvalidOperator(format!(
            "eigenfunction has {} entries, operator has {n} nodes",
            z_like.len()
        )));
    }
    let l = op.period();
    let h = op.spacing();
    let zs = PeriodicSpline::uniform(0.0, z_like.to_vec(), l);
    let origin = find_zero(&zs, z_like, h).ok_or(SpectralError::ZeroNotFound)?;
    let ps = PeriodicSpline::uniform(0.0, op.shape_weights().to_vec(), l);
    let p = |s: f64| ps.value(origin + s);
    let p0 = p(0.0);

    // y = [ζ, u = pζ', z, v = pz'].
    let f = |s: f64, y: &[f64; 4]| {
        let ps = p(s);
        [y[1] / ps, -mu * ps * y[0], y[3] / ps, -mu * ps * y[2]]
    };
    let steps = n * SUBSTEPS;
    let dt = l / steps as f64;
    let mut y = [1.0, 0.0, 0.0, 1.0];
    let mut drift = 0.0f64;
    let zhat_scale = 1.0 / (p0 * zs.derivative(origin));
    let zmax = z_like.iter().fold(0.0f64, |m, v| m.max(v.abs())) * zhat_scale.abs();
    let mut mismatch = 0.0f64;
    for step in 0..steps {
        let s = step as f64 * dt;
        let add = |a: &[f64; 4], k: &[f64; 4], t: f64| [a[0] + t * k[0], a[1] + t * k[1], a[2] + t * k[2], a[3] + t * k[3]];
        let k1 = f(s, &y);
        let k2 = f(s + 0.5 * dt, &add(&y, &k1, 0.5 * dt));
        let k3 = f(s + 0.5 * dt, &add(&y, &k2, 0.5 * dt));
        let k4 = f(s + dt, &add(&y, &k3, dt));
        for i in 0..4 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        drift = drift.max((y[0] * y[3] - y[1] * y[2] - 1.0).abs());
        if (step + 1) % SUBSTEPS == 0 {
            let zhat = zhat_scale * zs.value(origin + s + dt);
            mismatch = mismatch.max((y[2] - zhat).abs() / zmax);
        }
    }
    Ok(SecondSolution {
        mu,
        origin,
        zeta_defect: (y[0] - 1.0).abs(),
        zeta_prime_defect: (y[1] / p0).abs(),
        wronskian_drift: drift,
        z_defect: y[2].abs().max((y[3] - 1.0).abs()),
        z_mismatch: mismatch,
    })
}
