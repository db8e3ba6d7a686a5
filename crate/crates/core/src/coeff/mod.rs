//! Exact coefficient arithmetic.
//!
//! [`Polynomial`] is the computable stand-in for an element of C∞(ℝᵖ): a multivariate
//! polynomial with exact rational coefficients. [`SmoothAtom`] registers the analytic
//! functions whose jets are available at rational centers, and [`SmoothFn`] combines both
//! into the k-ary functions accepted by the smooth operations of the Grassmann algebra.

mod atoms;
pub(crate) mod polynomial;
mod rational;
mod smooth;

pub use atoms::{AtomTerm, SmoothAtom};
pub use polynomial::{Exponent, Polynomial};
pub use rational::{factorial, format_rational, parse_rational, rat, rat_int};
pub use smooth::SmoothFn;
