//! Arc-length sampled profile curves in the (ρ, z) half-plane.

use serde::{Deserialize, Serialize};

use super::GeometryError;
use crate::exec::Execution;
use crate::quadrature::{gauss_legendre, integrate};
use crate::spline::PeriodicSpline;

pub const MIN_NODES: usize = 16;
/// Chord-to-arc consistency tolerance of the unit-speed check.
pub const UNIT_SPEED_TOL: f64 = 1e-6;
/// Mirror tolerance of the z → −z symmetry detection.
pub const SYMMETRY_TOL: f64 = 1e-8;

/// Generating curve of a surface of revolution about the z axis, sampled at
/// uniform arc length `h = L / N` (closed) with the tangent angle `α` stored
/// per node: `(ρ', z') = (cos α, sin α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CurveWire", into = "CurveWire")]
pub struct ProfileCurve {
    rho: Vec<f64>,
    z: Vec<f64>,
    alpha: Vec<f64>,
    length: f64,
    closed: bool,
    symmetric_z: bool,
}

#[inline]
pub(crate) fn wrap_angle(a: f64) -> f64 {
    let t = std::f64::consts::TAU;
    a - t * (a / t).round()
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

impl ProfileCurve {
    /// Validating constructor. For a closed curve of `N` nodes the spacing is
    /// `L / N` and node `N` coincides with node 0; for an open curve it is
    /// `L / (N - 1)` and both end nodes are stored.
    pub fn new(rho: Vec<f64>, z: Vec<f64>, alpha: Vec<f64>, length: f64, closed: bool) -> Result<Self, GeometryError> {
        let n = rho.len();
        if z.len() != n || alpha.len() != n {
            return Err(GeometryError::Malformed("rho, z, alpha must have equal length".into()));
        }
        if n < MIN_NODES {
            return Err(GeometryError::TooFewNodes { got: n, min: MIN_NODES });
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(GeometryError::Malformed(format!("length must be positive, got {length}")));
        }
        if rho.iter().chain(&z).chain(&alpha).any(|v| !v.is_finite()) {
            return Err(GeometryError::Malformed("non-finite node value".into()));
        }
        if let Some((i, r)) = rho.iter().enumerate().find(|(_, r)| **r <= 0.0) {
            return Err(GeometryError::NonPositiveRadius { index: i, rho: *r });
        }
        let mut curve = Self { rho, z, alpha, length, closed, symmetric_z: false };
        curve.check_unit_speed()?;
        curve.symmetric_z = curve.mirror_defect(Execution::default()) <= SYMMETRY_TOL;
        Ok(curve)
    }

    /// Samples a unit-speed parametrization `s ↦ (ρ, z, α)` of a closed curve.
    pub fn from_arclength_fn<F>(n: usize, length: f64, f: F) -> Result<Self, GeometryError>
    where
        F: Fn(f64) -> (f64, f64, f64),
    {
        let h = length / n as f64;
        let (mut rho, mut z, mut alpha) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
        for i in 0..n {
            let (r, zz, a) = f(i as f64 * h);
            rho.push(r);
            z.push(zz);
            alpha.push(a);
        }
        Self::new(rho, z, alpha, length, true)
    }

    /// Profile circle `(R₀ + r cos u, r sin u)` of the round torus, traversed
    /// counterclockwise from the outer equator.
    pub fn round_torus(center_radius: f64, tube_radius: f64, n: usize) -> Result<Self, GeometryError> {
        let r = tube_radius;
        Self::from_arclength_fn(n, std::f64::consts::TAU * r, |s| {
            let u = s / r;
            (center_radius + r * u.cos(), r * u.sin(), u + std::f64::consts::FRAC_PI_2)
        })
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn is_symmetric_z(&self) -> bool {
        self.symmetric_z
    }

    pub fn spacing(&self) -> f64 {
        if self.closed {
            self.length / self.len() as f64
        } else {
            self.length / (self.len() - 1) as f64
        }
    }

    pub fn arclength(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Number of segments (`N` closed, `N - 1` open).
    fn segments(&self) -> usize {
        if self.closed {
            self.len()
        } else {
            self.len() - 1
        }
    }

    /// Turning angle between node `i` and its successor.
    pub fn turning(&self, i: usize) -> f64 {
        let j = (i + 1) % self.len();
        wrap_angle(self.alpha[j] - self.alpha[i])
    }

    /// Total turning divided by 2π (±1 for a simple closed curve).
    pub fn winding(&self) -> f64 {
        (0..self.segments()).map(|i| self.turning(i)).sum::<f64>() / std::f64::consts::TAU
    }

    /// Chord/arc check: for unit-speed samples the chord between neighbours is
    /// `h · sinc(δ/2)` with `δ` the turning angle, and points along the mean
    /// tangent.
    fn check_unit_speed(&self) -> Result<(), GeometryError> {
        let n = self.len();
        let h = self.spacing();
        for i in 0..self.segments() {
            let j = (i + 1) % n;
            let (dr, dz) = (self.rho[j] - self.rho[i], self.z[j] - self.z[i]);
            let chord = dr.hypot(dz);
            let delta = self.turning(i);
            let ratio = chord / (h * sinc(0.5 * delta));
            if (ratio - 1.0).abs() > UNIT_SPEED_TOL {
                return Err(GeometryError::NotUnitSpeed { index: i, ratio });
            }
            let mean = self.alpha[i] + 0.5 * delta;
            let dev = wrap_angle(dz.atan2(dr) - mean).abs();
            if dev > delta.abs() + UNIT_SPEED_TOL {
                return Err(GeometryError::InconsistentTangent { index: i, deviation: dev });
            }
        }
        Ok(())
    }

    /// Largest distance from a mirrored node `(ρ, −z)` to the nearest node.
    pub fn mirror_defect(&self, exec: Execution) -> f64 {
        let n = self.len();
        exec.map_range(n, |i| {
            (0..n)
                .map(|j| (self.rho[j] - self.rho[i]).hypot(self.z[j] + self.z[i]))
                .fold(f64::INFINITY, f64::min)
        })
        .into_iter()
        .fold(0.0, f64::max)
    }

    /// Homothety `(ρ, z) ↦ λ(ρ, z)`.
    pub fn scaled(&self, lambda: f64) -> Result<Self, GeometryError> {
        let rho = self.rho.iter().map(|v| v * lambda).collect();
        let z = self.z.iter().map(|v| v * lambda).collect();
        Self::new(rho, z, self.alpha.clone(), self.length * lambda, self.closed)
    }

    /// Translation along the rotation axis.
    pub fn translated_z(&self, dz: f64) -> Result<Self, GeometryError> {
        let z = self.z.iter().map(|v| v + dz).collect();
        Self::new(self.rho.clone(), z, self.alpha.clone(), self.length, self.closed)
    }
}

/// Reparametrizes a closed polyline by arc length.
///
/// The polyline must repeat its first point at the end. Points are joined by
/// a periodic cubic spline in cumulative chord length; the spline's arc length
/// is integrated with Gauss–Legendre per knot interval and inverted by
/// safeguarded Newton iteration to place `n` nodes at uniform arc length.
pub fn resample_arclength(points: &[(f64, f64)], n: usize) -> Result<ProfileCurve, GeometryError> {
    if points.len() < MIN_NODES + 1 {
        return Err(GeometryError::TooFewNodes { got: points.len().saturating_sub(1), min: MIN_NODES });
    }
    if n < MIN_NODES {
        return Err(GeometryError::TooFewNodes { got: n, min: MIN_NODES });
    }
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.0 <= 0.0) {
        return Err(GeometryError::NonPositiveRadius { index: i, rho: p.0 });
    }
    let first = points[0];
    let last = points[points.len() - 1];
    let scale = points.iter().map(|p| p.0.abs().max(p.1.abs())).fold(0.0, f64::max);
    let gap = (last.0 - first.0).hypot(last.1 - first.1);
    if gap > 1e-9 * scale.max(1.0) {
        return Err(GeometryError::OpenCurve { gap });
    }
    let pts = &points[..points.len() - 1];
    let m = pts.len();

    let mut knots = Vec::with_capacity(m);
    let mut t = 0.0;
    for i in 0..m {
        knots.push(t);
        let j = (i + 1) % m;
        let d = (pts[j].0 - pts[i].0).hypot(pts[j].1 - pts[i].1);
        if d == 0.0 {
            return Err(GeometryError::Malformed(format!("repeated point at index {j}")));
        }
        t += d;
    }
    let period = t;
    let xs = PeriodicSpline::new(knots.clone(), pts.iter().map(|p| p.0).collect(), period);
    let zs = PeriodicSpline::new(knots.clone(), pts.iter().map(|p| p.1).collect(), period);
    let speed = |u: f64| xs.derivative(u).hypot(zs.derivative(u));
    let rule = gauss_legendre(10);

    let interval_end = |i: usize| if i + 1 < m { knots[i + 1] } else { period };
    let mut cumulative = Vec::with_capacity(m + 1);
    cumulative.push(0.0);
    for i in 0..m {
        let len = integrate(speed, knots[i], interval_end(i), &rule);
        cumulative.push(cumulative[i] + len);
    }
    let total = cumulative[m];

    let h = total / n as f64;
    let (mut rho, mut z, mut alpha) = (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    let mut prev_alpha: Option<f64> = None;
    for k in 0..n {
        let target = k as f64 * h;
        let i = (cumulative.partition_point(|c| *c <= target) - 1).min(m - 1);
        let (lo, hi) = (knots[i], interval_end(i));
        let rem = target - cumulative[i];
        let (mut a, mut b) = (lo, hi);
        let mut u = lo + (hi - lo) * rem / (cumulative[i + 1] - cumulative[i]);
        for _ in 0..60 {
            let f = integrate(speed, lo, u, &rule) - rem;
            if f.abs() < 1e-15 * total {
                break;
            }
            if f > 0.0 {
                b = u;
            } else {
                a = u;
            }
            let next = u - f / speed(u);
            u = if next > a && next < b { next } else { 0.5 * (a + b) };
        }
        rho.push(xs.value(u));
        z.push(zs.value(u));
        let mut ang = zs.derivative(u).atan2(xs.derivative(u));
        if let Some(p) = prev_alpha {
            ang = p + wrap_angle(ang - p);
        }
        prev_alpha = Some(ang);
        alpha.push(ang);
    }
    ProfileCurve::new(rho, z, alpha, total, true)
}

/// Serialized form: parallel arrays plus flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CurveWire {
    length: f64,
    closed: bool,
    symmetric_z: bool,
    s: Vec<f64>,
    rho: Vec<f64>,
    z: Vec<f64>,
    alpha: Vec<f64>,
}

impl From<ProfileCurve> for CurveWire {
    fn from(c: ProfileCurve) -> Self {
        let s = (0..c.len()).map(|i| c.arclength(i)).collect();
        CurveWire { length: c.length, closed: c.closed, symmetric_z: c.symmetric_z, s, rho: c.rho, z: c.z, alpha: c.alpha }
    }
}

impl TryFrom<CurveWire> for ProfileCurve {
    type Error = GeometryError;

    fn try_from(w: CurveWire) -> Result<Self, Self::Error> {
        let c = ProfileCurve::new(w.rho, w.z, w.alpha, w.length, w.closed)?;
        check_uniform_s(&w.s, c.spacing(), c.length)?;
        Ok(c)
    }
}

pub(crate) fn check_uniform_s(s: &[f64], h: f64, length: f64) -> Result<(), GeometryError> {
    for (i, v) in s.iter().enumerate() {
        if (v - i as f64 * h).abs() > 1e-10 * length {
            return Err(GeometryError::NonUniformSpacing { index: i, s: *v });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn circle_points(m: usize) -> Vec<(f64, f64)> {
        (0..=m).map(|i| {
            let u = TAU * (i % m) as f64 / m as f64;
            (2.0 + u.cos(), u.sin())
        })
        .collect()
    }

    #[test]
    fn resampled_circle_has_length_two_pi() {
        let c = resample_arclength(&circle_points(1024), 1024).unwrap();
        assert!((c.length() - TAU).abs() < 1e-6);
        assert!((c.spacing() * 1024.0 - c.length()).abs() < 1e-12);
        assert!(c.is_symmetric_z());
        assert!((c.winding() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_axis_touching_and_open_input() {
        let mut pts = circle_points(64);
        pts[3].0 = 0.0;
        assert!(matches!(resample_arclength(&pts, 64), Err(GeometryError::NonPositiveRadius { .. })));
        let mut pts = circle_points(64);
        pts.pop();
        assert!(matches!(resample_arclength(&pts, 64), Err(GeometryError::OpenCurve { .. })));
    }

    #[test]
    fn constructor_rejects_wrong_tangent() {
        let c = ProfileCurve::round_torus(2.0, 1.0, 64).unwrap();
        let flipped: Vec<f64> = c.alpha().iter().map(|a| a + std::f64::consts::PI).collect();
        assert!(ProfileCurve::new(c.rho().to_vec(), c.z().to_vec(), flipped, c.length(), true).is_err());
        let bad_len = ProfileCurve::new(c.rho().to_vec(), c.z().to_vec(), c.alpha().to_vec(), 1.01 * c.length(), true);
        assert!(matches!(bad_len, Err(GeometryError::NotUnitSpeed { .. })));
    }

    #[test]
    fn json_round_trip_preserves_curve() {
        let c = ProfileCurve::round_torus(2.0, 1.0, 32).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: ProfileCurve = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }
}
