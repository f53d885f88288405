use super::SpectralError;

pub const DEFAULT_NODAL_THRESHOLD: f64 = 1e-7;

/// Nodal domains of a function sampled on a periodic grid.
///
/// Entries with `|φ| < threshold · max|φ|` are treated as zeros; the count is
/// the number of maximal cyclic runs of constant sign among the remaining
/// entries.
pub fn nodal_domains(phi: &[f64], threshold: f64) -> Result<usize, SpectralError> {
    let max = phi.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(max > 0.0) {
        return Err(SpectralError::AllBelowThreshold);
    }
    let cut = threshold * max;
    let signs: Vec<i8> = phi
        .iter()
        .filter(|v| v.abs() >= cut)
        .map(|v| if *v > 0.0 { 1 } else { -1 })
        .collect();
    if signs.is_empty() {
        return Err(SpectralError::AllBelowThreshold);
    }
    let n = signs.len();
    let changes = (0..n).filter(|&i| signs[i] != signs[(i + n - 1) % n]).count();
    Ok(changes.max(1))
}

/// Nodal domains of `ψ_k(θ) φ(s)` on the torus, with `ψ_k ∈ {cos kθ, sin kθ}`.
pub fn product_nodal_domains(k: usize, curve_factor_domains: usize) -> usize {
    if k == 0 {
        curve_factor_domains
    } else {
        2 * k * curve_factor_domains
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    #[test]
    fn simple_counts() {
        assert_eq!(nodal_domains(&[2.0; 10], 1e-7).unwrap(), 1);
        let s: Vec<f64> = (0..100).map(|i| (TAU * i as f64 / 100.0).sin()).collect();
        assert_eq!(nodal_domains(&s, 1e-7).unwrap(), 2);
        let s: Vec<f64> = (0..100).map(|i| (3.0 * TAU * i as f64 / 100.0).cos()).collect();
        assert_eq!(nodal_domains(&s, 1e-7).unwrap(), 6);
        assert!(matches!(nodal_domains(&[0.0; 5], 1e-7), Err(SpectralError::AllBelowThreshold)));
    }

    #[test]
    fn near_zeros_do_not_split_domains() {
        assert_eq!(nodal_domains(&[1.0, 1e-12, -1e-12, 1.0, -1.0], 1e-7).unwrap(), 2);
    }

    #[test]
    fn torus_products() {
        assert_eq!(product_nodal_domains(0, 2), 2);
        assert_eq!(product_nodal_domains(1, 1), 2);
        assert_eq!(product_nodal_domains(3, 2), 12);
    }
}
