//! The free Grassmann algebra ℚ[x1..xp][θ1..θq]^±.
//!
//! Odd monomials θ^I are stored as bitmasks (bit `j` is θ^{j+1}), always in the sorted
//! normal form θ^{i1}⋯θ^{ik} with i1 < ⋯ < ik. Coefficients are [`Polynomial`]s in the even
//! generators.
//!
//! [`Polynomial`]: crate::coeff::Polynomial

mod element;
mod morphism;
pub mod random;
mod signature;
mod smooth;

pub use element::{reorder_sign, GrassmannElement, Monomial};
pub use morphism::{Morphism, MorphismMismatch};
pub use signature::{AlgebraSignature, Parity, Signature, MAX_ODD};
pub use smooth::apply_smooth;
