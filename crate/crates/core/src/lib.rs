//! Linear Poisson holonomy along cotangent paths, modular vector fields, and
//! integrals of vector fields along cotangent paths, on polynomial Poisson
//! structures in a single linear chart.

// Tolerance checks are written as `!(x <= tol)` so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod conventions;
pub mod error;
pub mod geometry;
pub mod holonomy;
pub mod integrals;
pub mod lie;
pub mod linalg;
pub mod manifest;
pub mod modular;
pub mod paths;
pub mod poly;
pub mod presets;
pub mod runner;
pub mod spline;

pub use error::{Error, Result};
pub use geometry::{BivectorField, CovectorField, LeafSplitting, VectorField, VolumeDensity};
pub use holonomy::{holonomy, HolonomyConfig, HolonomyResult};
pub use lie::LieAlgebraPresentation;
pub use paths::{CotangentPath, TangentPath};
pub use poly::Poly;
