//! b-suprametric spaces, comparison functions and a certified Picard solver.
//!
//! A b-suprametric on a set `X` is a semimetric `d` with
//!
//! ```text
//! d(x, y) <= b (d(x, z) + d(z, y)) + rho d(x, z) d(z, y)
//! ```
//!
//! for fixed `b >= 1`, `rho >= 0`. [`space`] holds the axiom checks and the
//! parameter search, [`constructions`] and [`discrete`] concrete examples,
//! [`matkowski`] the comparison-function classes and [`fixpoint`] the
//! iteration together with its convergence certificates.

// `!(x < y)` is how NaN fails a check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructions;
pub mod discrete;
pub mod error;
pub mod expr;
pub mod fixpoint;
pub mod matkowski;
pub mod point;
pub mod space;

pub use error::{Error, Result};
pub use point::Point;
pub use space::{DistanceFn, SpaceClass, SpaceParams};
