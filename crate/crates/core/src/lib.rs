//! Polar-coordinate offset linear canonical transforms (OLCT) and their
//! Hankel counterparts (OLCHT), exactly bandlimited test-field synthesis, and
//! reconstruction from samples taken at normalized Bessel zeros in radius and
//! uniform points in azimuth.

// `!(x > 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bessel;
pub mod error;
pub mod harness;
pub mod params;
pub mod quadrature;
pub mod sampling;
pub mod synthesis;
pub mod transforms;

pub use error::{Error, Result};
pub use params::{InverseParams, OffsetParams};
