use serde::Serialize;

use super::SpectralError;
use crate::geometry::{ProfileCurve, RadialDensity, WeightedMeasure};
use crate::linalg::CyclicTridiag;

/// Weight of the consistent (P1 Galerkin) mass in the averaged mass matrix;
/// the remaining half is the lumped mass.
const CONSISTENT_FRACTION: f64 = 0.5;

/// Periodic Sturm–Liouville operator `−(1/p)(p y')' + q y` on a uniform grid.
///
/// The weak form is discretized with piecewise linear elements: stiffness
/// `Σ p_{e} (Δy)²/h` with element averages `p_e = (p_i + p_{i+1})/2`, and the
/// averaged mass (half lumped, half consistent). The discrete problem is the
/// symmetric pencil `K y = μ M y`.
///
/// Coefficients are assembled from the gauge-free weights `p_i e^{−a}`, so the
/// eigenvalues do not depend on the additive constant of the density.
#[derive(Debug, Clone, Serialize)]
pub struct SturmOperator {
    k: Option<usize>,
    period: f64,
    gauge: f64,
    shape_weights: Vec<f64>,
    potential: Vec<f64>,
    #[serde(skip)]
    stiffness: CyclicTridiag,
    #[serde(skip)]
    mass: CyclicTridiag,
}

fn mass_matrix(w: &[f64], h: f64) -> CyclicTridiag {
    let n = w.len();
    let we: Vec<f64> = (0..n).map(|i| 0.5 * (w[i] + w[(i + 1) % n])).collect();
    let diag = (0..n)
        .map(|i| {
            let prev = we[(i + n - 1) % n];
            (1.0 - CONSISTENT_FRACTION) * h * w[i] + CONSISTENT_FRACTION * h / 3.0 * (prev + we[i])
        })
        .collect();
    let off = we.iter().map(|e| CONSISTENT_FRACTION * h / 6.0 * e).collect();
    CyclicTridiag::new(diag, off)
}

fn stiffness_matrix(p: &[f64], pq: &[f64], h: f64) -> CyclicTridiag {
    let n = p.len();
    let pe: Vec<f64> = (0..n).map(|i| 0.5 * (p[i] + p[(i + 1) % n])).collect();
    let potential = mass_matrix(pq, h);
    let diag = (0..n).map(|i| (pe[(i + n - 1) % n] + pe[i]) / h + potential.diag()[i]).collect();
    let off = (0..n).map(|i| -pe[i] / h + potential.off()[i]).collect();
    CyclicTridiag::new(diag, off)
}

impl SturmOperator {
    /// `p = ρ e^ψ`, `q = k²/ρ²` on a closed profile.
    pub fn build(curve: &ProfileCurve, density: &RadialDensity, k: usize) -> Result<Self, SpectralError> {
        if !curve.is_closed() {
            return Err(SpectralError::InvalidOperator("profile curve must be closed".into()));
        }
        let measure = WeightedMeasure::new(curve, density)?;
        let k2 = (k * k) as f64;
        let potential = curve.rho().iter().map(|r| k2 / (r * r)).collect();
        Self::assemble(Some(k), curve.length(), measure.gauge(), measure.shape_weights().to_vec(), potential)
    }

    /// Operator from tabulated `p`, `q` at `N` uniform nodes of period `L`.
    pub fn from_tables(p: Vec<f64>, q: Vec<f64>, period: f64) -> Result<Self, SpectralError> {
        Self::assemble(None, period, 0.0, p, q)
    }

    fn assemble(
        k: Option<usize>,
        period: f64,
        gauge: f64,
        shape_weights: Vec<f64>,
        potential: Vec<f64>,
    ) -> Result<Self, SpectralError> {
        let n = shape_weights.len();
        if n < 3 || potential.len() != n {
            return Err(SpectralError::InvalidOperator(format!(
                "need matching p and q tables with at least 3 nodes (got {} and {})",
                n,
                potential.len()
            )));
        }
        if !(period > 0.0 && period.is_finite()) {
            return Err(SpectralError::InvalidOperator(format!("period must be positive, got {period}")));
        }
        if let Some(i) = shape_weights.iter().position(|p| !(*p > 0.0 && p.is_finite())) {
            return Err(SpectralError::InvalidOperator(format!("p must be positive, p[{i}] = {}", shape_weights[i])));
        }
        if let Some(i) = potential.iter().position(|q| !(*q >= 0.0 && q.is_finite())) {
            return Err(SpectralError::InvalidOperator(format!("q must be nonnegative, q[{i}] = {}", potential[i])));
        }
        let h = period / n as f64;
        let pq: Vec<f64> = shape_weights.iter().zip(&potential).map(|(p, q)| p * q).collect();
        let stiffness = stiffness_matrix(&shape_weights, &pq, h);
        let mass = mass_matrix(&shape_weights, h);
        Ok(Self { k, period, gauge, shape_weights, potential, stiffness, mass })
    }

    pub fn k(&self) -> Option<usize> {
        self.k
    }

    pub fn len(&self) -> usize {
        self.shape_weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.shape_weights.is_empty()
    }

    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn spacing(&self) -> f64 {
        self.period / self.len() as f64
    }

    pub fn gauge(&self) -> f64 {
        self.gauge
    }

    /// `p_i = ρ_i e^{ψ_i}`.
    pub fn weights(&self) -> Vec<f64> {
        let e = self.gauge.exp();
        self.shape_weights.iter().map(|p| e * p).collect()
    }

    /// `p_i e^{−a}`.
    pub fn shape_weights(&self) -> &[f64] {
        &self.shape_weights
    }

    /// `q_i`.
    pub fn potential(&self) -> &[f64] {
        &self.potential
    }

    pub fn has_potential(&self) -> bool {
        self.potential.iter().any(|q| *q != 0.0)
    }

    /// Stiffness matrix in the gauge-free weights.
    pub fn stiffness(&self) -> &CyclicTridiag {
        &self.stiffness
    }

    /// Mass matrix in the gauge-free weights.
    pub fn mass(&self) -> &CyclicTridiag {
        &self.mass
    }

    /// `⟨u, v⟩` in the discrete `p`-weighted inner product.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        let mv = self.mass.matvec(v);
        self.gauge.exp() * u.iter().zip(&mv).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Positive operator `A = −L = M⁻¹K`, so that `A y = μ y` on eigenfunctions.
    pub fn apply(&self, y: &[f64]) -> Vec<f64> {
        self.mass.factor().solve(&self.stiffness.matvec(y))
    }

    /// `L y = −A y`.
    pub fn apply_l(&self, y: &[f64]) -> Vec<f64> {
        self.apply(y).into_iter().map(|v| -v).collect()
    }
}

pub fn build_operator(curve: &ProfileCurve, density: &RadialDensity, k: usize) -> Result<SturmOperator, SpectralError> {
    SturmOperator::build(curve, density, k)
}
