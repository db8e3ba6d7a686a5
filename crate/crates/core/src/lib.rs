//! Exact computer-algebra kernel for finitely presented C∞-superrings.
//!
//! The crate is organised bottom-up:
//!
//! * [`coeff`]: exact multivariate polynomials over ℚ and jets of the analytic atoms
//!   `exp`, `sin`, `cos`, `log`.
//! * [`grassmann`]: the free Grassmann algebra over the polynomial ring, smooth k-ary
//!   operations and generator-image morphisms.
//! * [`derivations`]: superderivations, the Euler vector field, weight decomposition and
//!   adaptedness to the J-adic filtration.
//! * [`presentation`]: truncated quotient rings, ideal membership with certificates,
//!   associated graded pieces and the split search.
//! * [`cech`]: combinatorial covers, cocycle checks and the stage-wise gluing of
//!   chart-local splittings.
//! * [`dsl`]: the text front-end, command runner and JSON reports.
//!
//! Everything is exact. No floating point is used anywhere in the kernel.

pub mod cech;
pub mod coeff;
pub mod derivations;
pub mod dsl;
pub mod error;
pub mod grassmann;
pub mod linalg;
pub mod presentation;

pub use coeff::{Polynomial, SmoothAtom, SmoothFn};
pub use error::{KernelError, Result};
pub use grassmann::{AlgebraSignature, GrassmannElement, Morphism, Parity, Signature};
pub use derivations::SuperDerivation;
pub use presentation::Presentation;

pub use num_rational::BigRational;
