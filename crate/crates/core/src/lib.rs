//! Exact positivity decisions for divisor classes on projective bundles over
//! curves over the algebraic closure of a finite field, together with
//! Neron-Severi cone certificates for nef classes that are not numerically
//! effective.

pub mod bundle;
pub mod cli;
pub mod chow;
pub mod error;
pub mod ns_cone;
pub mod numbers;
pub mod positivity;
pub mod rationalize;
pub mod selftest;
pub(crate) mod wire;

pub use error::{Error, Result};
