//! Kernels, quadrature and numerical identity checks for harmonic and
//! subharmonic functions on the upper half-plane and the upper half-space.
//!
//! Plane points are [`num_complex::Complex64`] values `x + iy`; half-space points are
//! slices `[x_1, ..., x_n]` with `x_n` the height above the boundary hyperplane.

// NaN-rejecting guards are written as `!(x > 0.0)`; quadrature nodes keep their published digits
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision, clippy::type_complexity)]

pub mod dirichlet;
pub mod error;
pub mod growth;
pub mod identities;
pub mod plane_kernels;
pub mod quadrature;
pub mod report;
mod sampling;
pub mod space_kernels;
pub mod special;

pub use error::{Error, Result};
pub use report::VerificationReport;

pub use num_complex::Complex64;
