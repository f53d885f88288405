//! Profile curves, radial densities and the weighted geometry of the
//! revolution surfaces they generate.

mod center;
mod curve;
mod density;
pub mod io;
mod measure;
mod surface;

pub use center::{
    center_of_psi_mass, coordinate_fields, descend_center, psi_barycenter, psi_mass_functional, CenterDescent,
    CenterPotential, CoordinateFields, DescentOptions, FnPotential, HalfSquare,
};
pub use curve::{resample_arclength, ProfileCurve, MIN_NODES, SYMMETRY_TOL, UNIT_SPEED_TOL};
pub use density::{DensityKind, RadialDensity, RadialTable};
pub use measure::{weighted_volume, WeightedMeasure};
pub use surface::{profile_curvature, revolution_mean_curvature, surface_geometry, NodeGeometry, SurfaceGeometry};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("profile radius must stay positive: rho[{index}] = {rho}")]
    NonPositiveRadius { index: usize, rho: f64 },
    #[error("polyline does not close (endpoint gap {gap:e})")]
    OpenCurve { gap: f64 },
    #[error("need at least {min} nodes, got {got}")]
    TooFewNodes { got: usize, min: usize },
    #[error("samples are not unit speed at segment {index} (chord/arc ratio {ratio})")]
    NotUnitSpeed { index: usize, ratio: f64 },
    #[error("tangent angle inconsistent with positions at segment {index} (deviation {deviation:e} rad)")]
    InconsistentTangent { index: usize, deviation: f64 },
    #[error("arc-length column is not uniform at row {index} (s = {s})")]
    NonUniformSpacing { index: usize, s: f64 },
    #[error("density center must lie on the rotation axis")]
    OffAxisDensity,
    #[error("density weight e^psi degenerate (psi = {0})")]
    DegenerateWeight(f64),
    #[error("invalid density: {0}")]
    InvalidDensity(String),
    #[error("center of psi-mass did not converge after {iterations} iterations (|grad| = {gradient_norm:e})")]
    NoConvergence { iterations: usize, gradient_norm: f64 },
    #[error("malformed profile: {0}")]
    Malformed(String),
    #[error("parse error: {0}")]
    Parse(String),
}
