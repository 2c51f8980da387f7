//! Numerical laboratory for the diffusive expansion of the steady neutron
//! transport equation `w·∇u + ε⁻¹(u − ū) = 0` with in-flow boundary data.
//!
//! The crate builds every piece of the expansion `u ≈ U₀ + εU₁ + ε²U₂ + U^B₀`
//! on disks, annuli, balls and shells, solves the kinetic problem itself, and
//! measures the norms whose ε-scaling the theory predicts.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod data;
pub mod error;
pub mod interior;
pub mod linalg;
pub mod milne;
pub mod quadgeom;
pub mod sources;
pub mod study;
pub mod transport;

pub use data::BoundaryData;
pub use error::{Error, Result};
pub use study::{run_study, ConvergenceReport, StudyConfig};
