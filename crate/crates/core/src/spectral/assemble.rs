use serde::Serialize;

use super::eigen::ModeSpectrum;
use super::nodal::product_nodal_domains;
use super::SpectralError;

/// One eigenvalue of the torus: `μ_j` of mode `k`, with multiplicity 2 for
/// `k ≥ 1` (the `cos kθ` and `sin kθ` partners).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub k: usize,
    pub j: usize,
    pub multiplicity: usize,
    /// Nodal domains of the profile factor `φ_j`.
    pub curve_nodal_domains: usize,
    /// Nodal domains of `ψ_k φ_j` on the torus.
    pub nodal_domains: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub entries: Vec<SpectrumEntry>,
    pub lambda1: f64,
    pub lambda1_k: usize,
    pub lambda1_j: usize,
    pub zero_tol: f64,
    pub k_max: usize,
    pub j_max: usize,
    pub warnings: Vec<String>,
}

impl SpectrumReport {
    /// Entries with `|value − λ₁| ≤ rel_tol · λ₁`.
    pub fn lambda1_realizers(&self, rel_tol: f64) -> Vec<&SpectrumEntry> {
        self.entries.iter().filter(|e| (e.value - self.lambda1).abs() <= rel_tol * self.lambda1).collect()
    }

    pub fn entry(&self, k: usize, j: usize) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.k == k && e.j == j)
    }
}

/// Merges per-mode ladders into the torus spectrum. `λ₁` is the smallest
/// eigenvalue above `zero_tol`.
pub fn assemble_spectrum(modes: &[ModeSpectrum], zero_tol: f64) -> Result<SpectrumReport, SpectralError> {
    if !(zero_tol >= 0.0) {
        return Err(SpectralError::InvalidOperator(format!("zero_tol must be nonnegative, got {zero_tol}")));
    }
    let mut warnings = Vec::new();
    let mut entries = Vec::new();
    let mut k_max = 0;
    let mut j_max = 0;
    for m in modes {
        let k = m.k.ok_or(SpectralError::MissingModeIndex)?;
        k_max = k_max.max(k);
        j_max = j_max.max(m.len().saturating_sub(1));
        for (j, &value) in m.eigenvalues.iter().enumerate() {
            let nodal = m.nodal_counts[j];
            entries.push(SpectrumEntry {
                value,
                k,
                j,
                multiplicity: if k == 0 { 1 } else { 2 },
                curve_nodal_domains: nodal,
                nodal_domains: product_nodal_domains(k, nodal),
            });
        }
    }
    entries.sort_by(|a, b| a.value.total_cmp(&b.value).then(a.k.cmp(&b.k)).then(a.j.cmp(&b.j)));
    if k_max < 2 {
        warnings.push(format!("only modes k <= {k_max} solved; the first eigenvalue may come from a higher mode"));
    }
    let first = entries.iter().find(|e| e.value > zero_tol).copied().ok_or(SpectralError::NoNonzeroEigenvalue)?;
    if first.k == k_max && k_max > 0 {
        warnings.push(format!("first eigenvalue attained at the truncation mode k = {k_max}"));
    }
    if first.j == j_max {
        warnings.push(format!("first eigenvalue attained at the truncation index j = {j_max}"));
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(SpectrumReport {
        entries,
        lambda1: first.value,
        lambda1_k: first.k,
        lambda1_j: first.j,
        zero_tol,
        k_max,
        j_max,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mode(k: usize, values: &[f64]) -> ModeSpectrum {
        ModeSpectrum {
            k: Some(k),
            eigenvalues: values.to_vec(),
            eigenfunctions: vec![],
            nodal_counts: vec![1; values.len()],
            residuals: vec![0.0; values.len()],
        }
    }

    #[test]
    fn merges_and_tags_multiplicity() {
        let r = assemble_spectrum(&[mode(0, &[0.0, 3.0, 4.0]), mode(1, &[2.5, 5.0]), mode(2, &[6.0, 7.0])], 1e-6)
            .unwrap();
        assert_eq!(r.lambda1, 2.5);
        assert_eq!((r.lambda1_k, r.lambda1_j), (1, 0));
        assert_eq!(r.entries[1].multiplicity, 2);
        assert!(r.entries.windows(2).all(|w| w[0].value <= w[1].value));
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn flags_truncation() {
        let r = assemble_spectrum(&[mode(0, &[0.0, 3.0])], 1e-6).unwrap();
        assert_eq!(r.lambda1, 3.0);
        assert_eq!(r.warnings.len(), 2);
    }
}
