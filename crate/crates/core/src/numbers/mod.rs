//! Exact arithmetic over the rationals and a single real quadratic field
//! `Q(sqrt(d))` per computation.
//!
//! Every coefficient that would be real-valued in the geometric setting is a
//! [`FieldElem`]; rationals embed with a zero radical part and mix freely with
//! any radicand.

mod cf;
mod field;
mod rational;

pub use cf::continued_fraction_approx;
pub use field::{arith, ArithOp, FieldElem, Radicand};
pub use rational::{parse_rational, rational_from_i64, Rational};
