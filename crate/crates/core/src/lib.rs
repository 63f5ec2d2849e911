//! Spectral computation of balanced homogeneous functions and maps on cones
//! over graphs.
//!
//! A cone graph assigns an angle `θ(e)` to every edge of a connected multigraph;
//! gluing flat sectors of those angles produces a two-dimensional cone. The
//! crate computes the degrees `α` for which `r^α ρ` extends to a balanced
//! harmonic function (or, with target angles `φ(e)`, a balanced harmonic map
//! into the cone with those angles), cross-checks them against a finite
//! element discretization of the metric graph, and provides the k-pod and
//! p-harmonic special cases.
//!
//! All numerical routines are generic over [`Real`] (`f32` and `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod conemap;
pub mod error;
pub mod euclid;
pub mod format;
pub mod graph;
pub mod kpod;
pub mod laplacian;
pub mod linalg;
pub mod oracle;
pub mod scalar;
pub mod scan;

pub use error::{Error, Result};
pub use graph::{ConeGraph, EdgeSpec, ValidationReport};
pub use scalar::Real;
pub use scan::ScanConfig;

pub type ConeGraph64 = graph::ConeGraph<f64>;
pub type ConeGraph32 = graph::ConeGraph<f32>;
pub type SymMatrix64 = linalg::SymMatrix<f64>;
pub type DegreeSpectrum64 = euclid::DegreeSpectrum<f64>;
pub type SingularReport64 = euclid::SingularReport<f64>;
pub type ScanConfig64 = scan::ScanConfig<f64>;
pub type OracleResult64 = oracle::OracleResult<f64>;

