//! Superderivations of the free Grassmann algebra.
//!
//! A [`SuperDerivation`] is stored by its values on the generators and acts through the
//! graded Leibniz rule. [`leibniz_check`] is an independent checker that accepts any
//! [`SuperLinearMap`], including deliberately broken ones.

mod adapted;
mod derivation;
mod eigen;
mod leibniz;

pub use adapted::{adapted_check, AdaptedFailure, AdaptedReport};
pub use derivation::SuperDerivation;
pub(crate) use derivation::combine;
pub use eigen::{eigen_decompose, filtration_splitting, EigenDecomposition, FiltrationLevel};
pub use leibniz::{leibniz_check, LeibnizReport, LeibnizViolation, RawLinearMap, SuperLinearMap};
