//! Separation of the drift Laplacian on a revolution torus into angular
//! modes `k`, each a periodic Sturm–Liouville problem
//! `−(1/p)(p y')' + (k²/ρ²) y = μ y` with `p = ρ e^ψ` along the profile.
//! The torus eigenvalues are the union of the `μ_j^{(k)}`, with multiplicity
//! two for `k ≥ 1`.

mod assemble;
mod eigen;
mod identities;
mod nodal;
mod operator;

pub use assemble::{assemble_spectrum, SpectrumEntry, SpectrumReport};
pub use eigen::{solve_all_modes, solve_modes, ModeSpectrum};
pub use identities::{second_solution_check, verify_coordinate_eigenfunctions, CoordinateResiduals, SecondSolution};
pub use nodal::{nodal_domains, product_nodal_domains, DEFAULT_NODAL_THRESHOLD};
pub use operator::{build_operator, SturmOperator};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("inverse iteration did not converge for k = {k:?}, j = {j} (residual {residual:e})")]
    EigensolverFailure { k: Option<usize>, j: usize, residual: f64 },
    #[error("function is below the nodal threshold everywhere")]
    AllBelowThreshold,
    #[error("function has no sign change")]
    ZeroNotFound,
    #[error("mode spectrum has no angular index")]
    MissingModeIndex,
    #[error("no eigenvalue above the zero tolerance")]
    NoNonzeroEigenvalue,
    #[error("density is not Gaussian")]
    NotGaussian,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}
