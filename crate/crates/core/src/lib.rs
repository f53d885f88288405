//! Spectral analysis of weighted Laplacians on revolution tori, with a
//! shooting method for rotationally symmetric self-shrinkers and
//! Reilly-type upper bounds for the first eigenvalue.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cli;
pub mod exec;
pub mod geometry;
pub mod linalg;
pub mod quadrature;
pub mod reilly;
pub mod shrinker;
pub mod spectral;
pub mod spline;

pub use exec::Execution;
