//! Radial densities `e^ψ` on R³.
//!
//! Every density carries an additive gauge `a` and a shape part, so that
//! `ψ(x) = a + shape(|x - p|)`. Quantities that are mathematically
//! independent of `a` (weighted mean curvature, eigenvalues, bounds) are
//! computed from the shape part alone and are therefore exactly
//! gauge invariant.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Tabulated radial profile `f(r)` with derivative `f'(r)`, interpolated by
/// cubic Hermite segments and extended linearly past the last sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    pub r: Vec<f64>,
    pub f: Vec<f64>,
    pub df: Vec<f64>,
}

impl RadialTable {
    pub fn new(r: Vec<f64>, f: Vec<f64>, df: Vec<f64>) -> Result<Self, GeometryError> {
        if r.len() < 2 || r.len() != f.len() || r.len() != df.len() {
            return Err(GeometryError::InvalidDensity("radial table needs >= 2 rows of (r, f, f')".into()));
        }
        if r[0] < 0.0 || r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(GeometryError::InvalidDensity("radial table r must be >= 0 and increasing".into()));
        }
        if r.iter().chain(&f).chain(&df).any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidDensity("radial table contains non-finite values".into()));
        }
        Ok(Self { r, f, df })
    }

    /// Value and derivative at radius `t`.
    pub fn eval(&self, t: f64) -> (f64, f64) {
        let n = self.r.len();
        if t <= self.r[0] {
            return (self.f[0] + self.df[0] * (t - self.r[0]), self.df[0]);
        }
        if t >= self.r[n - 1] {
            return (self.f[n - 1] + self.df[n - 1] * (t - self.r[n - 1]), self.df[n - 1]);
        }
        let i = self.r.partition_point(|x| *x <= t) - 1;
        let h = self.r[i + 1] - self.r[i];
        let u = (t - self.r[i]) / h;
        let (f0, f1, d0, d1) = (self.f[i], self.f[i + 1], self.df[i] * h, self.df[i + 1] * h);
        let h00 = 2.0 * u * u * u - 3.0 * u * u + 1.0;
        let h10 = u * u * u - 2.0 * u * u + u;
        let h01 = -2.0 * u * u * u + 3.0 * u * u;
        let h11 = u * u * u - u * u;
        let value = h00 * f0 + h10 * d0 + h01 * f1 + h11 * d1;
        let dh00 = 6.0 * u * u - 6.0 * u;
        let dh10 = 3.0 * u * u - 4.0 * u + 1.0;
        let dh01 = -6.0 * u * u + 6.0 * u;
        let dh11 = 3.0 * u * u - 2.0 * u;
        let deriv = (dh00 * f0 + dh10 * d0 + dh01 * f1 + dh11 * d1) / h;
        (value, deriv)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum DensityKind {
    /// `shape = (C/2) |x - p|²`.
    Gaussian { c: f64 },
    Constant,
    Custom(RadialTable),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DensityWire", into = "DensityWire")]
pub struct RadialDensity {
    kind: DensityKind,
    a: f64,
    center: Vector3<f64>,
}

impl RadialDensity {
    pub fn gaussian(a: f64, c: f64, center: Vector3<f64>) -> Self {
        Self { kind: DensityKind::Gaussian { c }, a, center }
    }

    /// Gaussian centered at the origin.
    pub fn gaussian_at_origin(a: f64, c: f64) -> Self {
        Self::gaussian(a, c, Vector3::zeros())
    }

    pub fn constant(a: f64) -> Self {
        Self { kind: DensityKind::Constant, a, center: Vector3::zeros() }
    }

    pub fn custom(a: f64, table: RadialTable, center: Vector3<f64>) -> Self {
        Self { kind: DensityKind::Custom(table), a, center }
    }

    pub fn kind(&self) -> &DensityKind {
        &self.kind
    }

    pub fn gauge(&self) -> f64 {
        self.a
    }

    pub fn center(&self) -> Vector3<f64> {
        self.center
    }

    /// Same density with the gauge constant replaced.
    pub fn with_gauge(&self, a: f64) -> Self {
        Self { a, ..self.clone() }
    }

    pub fn gaussian_c(&self) -> Option<f64> {
        match self.kind {
            DensityKind::Gaussian { c } => Some(c),
            _ => None,
        }
    }

    /// True when the density is invariant under rotations about the z axis.
    pub fn is_axial(&self) -> bool {
        matches!(self.kind, DensityKind::Constant) || (self.center.x == 0.0 && self.center.y == 0.0)
    }

    /// `ψ(x) - a`.
    pub fn shape(&self, x: &Vector3<f64>) -> f64 {
        match &self.kind {
            DensityKind::Gaussian { c } => 0.5 * c * (x - self.center).norm_squared(),
            DensityKind::Constant => 0.0,
            DensityKind::Custom(t) => t.eval((x - self.center).norm()).0,
        }
    }

    pub fn psi(&self, x: &Vector3<f64>) -> f64 {
        self.a + self.shape(x)
    }

    /// Ambient gradient ∇̄ψ.
    pub fn grad(&self, x: &Vector3<f64>) -> Vector3<f64> {
        match &self.kind {
            DensityKind::Gaussian { c } => (x - self.center) * *c,
            DensityKind::Constant => Vector3::zeros(),
            DensityKind::Custom(t) => {
                let d = x - self.center;
                let r = d.norm();
                if r == 0.0 {
                    Vector3::zeros()
                } else {
                    d * (t.eval(r).1 / r)
                }
            }
        }
    }

    /// `e^ψ(x)`, checked to be a positive finite number.
    pub fn weight(&self, x: &Vector3<f64>) -> Result<f64, GeometryError> {
        positive_exp(self.psi(x))
    }

    /// `e^{ψ(x) - a}`, checked.
    pub fn shape_weight(&self, x: &Vector3<f64>) -> Result<f64, GeometryError> {
        positive_exp(self.shape(x))
    }
}

fn positive_exp(v: f64) -> Result<f64, GeometryError> {
    let w = v.exp();
    if w > 0.0 && w.is_finite() {
        Ok(w)
    } else {
        Err(GeometryError::DegenerateWeight(v))
    }
}

/// JSON form `{kind, a, C, center}`; custom densities add `table`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct DensityWire {
    kind: String,
    a: f64,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    c: Option<f64>,
    #[serde(default)]
    center: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    table: Option<RadialTable>,
}

impl TryFrom<DensityWire> for RadialDensity {
    type Error = GeometryError;

    fn try_from(w: DensityWire) -> Result<Self, Self::Error> {
        let center = Vector3::from(w.center);
        if !w.a.is_finite() || center.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidDensity("non-finite gauge or center".into()));
        }
        match w.kind.as_str() {
            "gaussian" => {
                let c = w.c.ok_or_else(|| GeometryError::InvalidDensity("gaussian density needs C".into()))?;
                if !c.is_finite() {
                    return Err(GeometryError::InvalidDensity("C must be finite".into()));
                }
                Ok(Self::gaussian(w.a, c, center))
            }
            "constant" => Ok(Self { kind: DensityKind::Constant, a: w.a, center }),
            "custom" => {
                let t = w.table.ok_or_else(|| GeometryError::InvalidDensity("custom density needs table".into()))?;
                let t = RadialTable::new(t.r, t.f, t.df)?;
                Ok(Self::custom(w.a, t, center))
            }
            other => Err(GeometryError::InvalidDensity(format!("unknown density kind `{other}`"))),
        }
    }
}

impl From<RadialDensity> for DensityWire {
    fn from(d: RadialDensity) -> Self {
        let center = [d.center.x, d.center.y, d.center.z];
        match d.kind {
            DensityKind::Gaussian { c } => DensityWire { kind: "gaussian".into(), a: d.a, c: Some(c), center, table: None },
            DensityKind::Constant => DensityWire { kind: "constant".into(), a: d.a, c: None, center, table: None },
            DensityKind::Custom(t) => DensityWire { kind: "custom".into(), a: d.a, c: None, center, table: Some(t) },
        }
    }
}
