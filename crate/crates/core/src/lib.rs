//! Radial spherical Fourier analysis and Schrodinger propagation on
//! Damek-Ricci spaces and Euclidean space.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::excessive_precision, clippy::needless_range_loop))]

pub mod counterexample;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod par;
pub mod propagator;
pub mod quadrature;
pub mod specfun;
pub mod spline;
pub mod transforms;

pub use error::{HypError, Result};
pub use geometry::{Annulus, CurveFamily, CurveKind, CurveTable, Space};
