use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::nodal::{nodal_domains, DEFAULT_NODAL_THRESHOLD};
use super::operator::SturmOperator;
use super::SpectralError;
use crate::exec::Execution;
use crate::geometry::{ProfileCurve, RadialDensity};

const SEED: u64 = 0x5eed_5713;
const MAX_INVERSE_ITERATIONS: usize = 30;
const RESIDUAL_TOL: f64 = 1e-9;

/// Lowest `j_max + 1` eigenpairs of one angular mode.
#[derive(Debug, Clone, Serialize)]
pub struct ModeSpectrum {
    pub k: Option<usize>,
    pub eigenvalues: Vec<f64>,
    /// Orthonormal in the discrete `p`-weighted inner product of the operator.
    #[serde(skip)]
    pub eigenfunctions: Vec<Vec<f64>>,
    pub nodal_counts: Vec<usize>,
    /// `‖Kφ − μMφ‖∞ / (‖K‖∞ ‖φ‖∞)`.
    pub residuals: Vec<f64>,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }
}

fn count_below(op: &SturmOperator, sigma: f64) -> usize {
    op.stiffness().shifted(sigma, op.mass()).factor().negative_count()
}

/// `j`-th eigenvalue (0-based) by bisection on the Sturm count.
fn bisect_eigenvalue(op: &SturmOperator, j: usize, upper: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, upper);
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(op, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn upper_bound(op: &SturmOperator, count: usize) -> f64 {
    let mut hi = op.stiffness().norm_inf() / op.mass().norm_inf();
    if !(hi > 0.0) {
        hi = 1.0;
    }
    while count_below(op, hi) < count {
        hi *= 2.0;
    }
    hi
}

fn m_orthogonalize(op: &SturmOperator, x: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let mb = op.mass().matvec(b);
        let c: f64 = x.iter().zip(&mb).map(|(u, v)| u * v).sum();
        for (xi, bi) in x.iter_mut().zip(b) {
            *xi -= c * bi;
        }
    }
}

fn m_normalize(op: &SturmOperator, x: &mut [f64]) {
    let mx = op.mass().matvec(x);
    let nrm = x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>().sqrt();
    x.iter_mut().for_each(|v| *v /= nrm);
}

fn residual(op: &SturmOperator, mu: f64, x: &[f64]) -> f64 {
    let kx = op.stiffness().matvec(x);
    let mx = op.mass().matvec(x);
    let r = kx.iter().zip(&mx).map(|(a, b)| (a - mu * b).abs()).fold(0.0, f64::max);
    let xn = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    r / (op.stiffness().norm_inf() * xn)
}

/// Rayleigh quotient with the stiffness energy summed over edge differences,
/// which avoids the cancellation of `xᵀKx` near the bottom of the spectrum.
fn rayleigh(op: &SturmOperator, x: &[f64]) -> f64 {
    let k = op.stiffness();
    let (d, o) = (k.diag(), k.off());
    let n = x.len();
    let mut energy = 0.0;
    for i in 0..n {
        let next = (i + 1) % n;
        let prev = (i + n - 1) % n;
        energy -= o[i] * (x[next] - x[i]).powi(2);
        energy += (d[i] + o[i] + o[prev]) * x[i] * x[i];
    }
    let mx = op.mass().matvec(x);
    energy / x.iter().zip(&mx).map(|(a, b)| a * b).sum::<f64>()
}

/// First entry above the nodal threshold is made positive.
fn fix_sign(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(first) = x.iter().find(|v| v.abs() >= DEFAULT_NODAL_THRESHOLD * max) {
        if *first < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
}

fn inverse_iteration(op: &SturmOperator, mu: f64, basis: &[Vec<f64>], seed: u64) -> Result<(Vec<f64>, f64), f64> {
    let n = op.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    m_orthogonalize(op, &mut x, basis);
    m_normalize(op, &mut x);
    let ldl = op.stiffness().shifted(mu, op.mass()).factor();
    let mut res = f64::INFINITY;
    for _ in 0..MAX_INVERSE_ITERATIONS {
        let mut y = ldl.solve(&op.mass().matvec(&x));
        m_orthogonalize(op, &mut y, basis);
        m_normalize(op, &mut y);
        x = y;
        res = residual(op, mu, &x);
        if res < RESIDUAL_TOL {
            return Ok((x, res));
        }
    }
    Err(res)
}

/// Constant vectors span the kernel exactly when `q ≡ 0`.
fn constant_kernel(op: &SturmOperator) -> Option<Vec<f64>> {
    if op.has_potential() {
        return None;
    }
    let ones = vec![1.0; op.len()];
    let k1 = op.stiffness().matvec(&ones);
    let scale = op.stiffness().norm_inf();
    k1.iter().all(|v| v.abs() <= 64.0 * f64::EPSILON * scale).then_some(ones)
}

/// Lowest `j_max + 1` eigenpairs of `K y = μ M y`.
///
/// Eigenvalues come from bisection on the inertia of `K − σM` and are
/// therefore correctly ordered including multiplicities. Eigenvectors come
/// from inverse iteration at the converged shift, orthogonalized against
/// the previously found vectors of the mode, so degenerate pairs receive
/// independent vectors. With `q ≡ 0` the ground state is pinned to `μ = 0`
/// with a constant eigenfunction.
pub fn solve_modes(op: &SturmOperator, j_max: usize, exec: Execution) -> Result<ModeSpectrum, SpectralError> {
    let count = j_max + 1;
    if count > op.len() {
        return Err(SpectralError::InvalidOperator(format!(
            "j_max = {j_max} needs more than the {} grid nodes",
            op.len()
        )));
    }
    let kernel = constant_kernel(op);
    let start = usize::from(kernel.is_some());
    let upper = upper_bound(op, count);
    let mut eigenvalues = vec![0.0; start];
    eigenvalues.extend(exec.map_range(count - start, |j| bisect_eigenvalue(op, j + start, upper)));

    let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(count);
    let mut residuals = Vec::with_capacity(count);
    if let Some(mut ones) = kernel {
        m_normalize(op, &mut ones);
        vectors.push(ones);
        residuals.push(0.0);
    }
    let kseed = op.k().unwrap_or(usize::MAX) as u64;
    for (j, mu) in eigenvalues.iter_mut().enumerate().skip(start) {
        let seed = SEED ^ kseed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ j as u64;
        let (mut x, res) = inverse_iteration(op, *mu, &vectors, seed).map_err(|residual| {
            SpectralError::EigensolverFailure { k: op.k(), j, residual }
        })?;
        *mu = rayleigh(op, &x);
        fix_sign(&mut x);
        vectors.push(x);
        residuals.push(res);
    }
    // Normalize in the full (gauge-carrying) weights.
    let scale = (-0.5 * op.gauge()).exp();
    for v in &mut vectors {
        v.iter_mut().for_each(|x| *x *= scale);
    }
    let nodal_counts = vectors
        .iter()
        .map(|v| nodal_domains(v, DEFAULT_NODAL_THRESHOLD))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ModeSpectrum { k: op.k(), eigenvalues, eigenfunctions: vectors, nodal_counts, residuals })
}

/// Builds and solves the modes `k = 0..=k_max`, in parallel over `k`.
pub fn solve_all_modes(
    curve: &ProfileCurve,
    density: &RadialDensity,
    k_max: usize,
    j_max: usize,
    exec: Execution,
) -> Result<Vec<ModeSpectrum>, SpectralError> {
    exec.map_range(k_max + 1, |k| {
        let op = SturmOperator::build(curve, density, k)?;
        solve_modes(&op, j_max, exec)
    })
    .into_iter()
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn flat_circle_ladder() {
        let l = 3.0;
        let op = SturmOperator::from_tables(vec![1.0; 256], vec![0.0; 256], l).unwrap();
        let ms = solve_modes(&op, 6, Execution::Sequential).unwrap();
        assert_eq!(ms.eigenvalues[0], 0.0);
        for (j, mu) in ms.eigenvalues.iter().enumerate().skip(1) {
            let m = j.div_ceil(2);
            let exact = (TAU * m as f64 / l).powi(2);
            assert!((mu / exact - 1.0).abs() < 1e-6, "j = {j}: {mu} vs {exact}");
        }
        assert_eq!(ms.nodal_counts, vec![1, 2, 2, 4, 4, 6, 6]);
    }

    #[test]
    fn eigenfunctions_are_orthonormal() {
        let c = ProfileCurve::round_torus(2.0, 1.0, 128).unwrap();
        let d = RadialDensity::gaussian_at_origin(0.4, -1.0);
        for k in [0, 2] {
            let op = SturmOperator::build(&c, &d, k).unwrap();
            let ms = solve_modes(&op, 8, Execution::Sequential).unwrap();
            for a in 0..ms.len() {
                for b in 0..ms.len() {
                    let g = op.inner(&ms.eigenfunctions[a], &ms.eigenfunctions[b]);
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((g - want).abs() < 1e-8, "k={k} ({a},{b}) = {g}");
                }
            }
            if k > 0 {
                assert!(ms.eigenvalues[0] > 0.0);
            }
        }
    }

    #[test]
    fn execution_policies_agree_bitwise() {
        let c = ProfileCurve::round_torus(2.0, 1.0, 96).unwrap();
        let d = RadialDensity::gaussian_at_origin(0.0, -1.0);
        let a = solve_all_modes(&c, &d, 3, 4, Execution::Sequential).unwrap();
        let b = solve_all_modes(&c, &d, 3, 4, Execution::Parallel).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.eigenvalues, y.eigenvalues);
            assert_eq!(x.eigenfunctions, y.eigenfunctions);
        }
    }
}
