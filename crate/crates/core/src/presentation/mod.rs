//! Finitely presented superrings at a fixed truncation degree.
//!
//! Every computation happens in the free algebra modulo the relations and modulo all terms
//! of total degree above `D` (polynomial degree plus odd weight). Ideals, J-powers and
//! graded pieces are subspaces of that finite-dimensional space, handled by exact row
//! reduction over the monomial basis.

mod graded;
mod quotient;
mod span;
mod split;

pub use graded::{graded_basis, GradedPiece};
pub use quotient::{CertificateTerm, Membership, Presentation, DEFAULT_COEFF_DEGREE, DEFAULT_TRUNCATION};
pub use span::{MonomialIndex, SpanBasis, SpanLabel};
pub use split::{split_search, SplitCertificate, SplitVerdict};
