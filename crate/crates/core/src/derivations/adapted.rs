use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use super::derivation::SuperDerivation;
use crate::error::{KernelError, Result};
use crate::grassmann::{GrassmannElement, Monomial, Parity};
use crate::presentation::Presentation;

/// A spanning vector `m` of `J^k` with `(E - k) m ∉ J^{k+1}`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdaptedFailure {
    pub k: u32,
    pub witness: GrassmannElement,
    /// `(E - k) m`, truncated to the working degree.
    pub image: GrassmannElement,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AdaptedReport {
    pub max_degree: u32,
    /// Number of (k, monomial) pairs examined.
    pub checked: usize,
    pub failure: Option<AdaptedFailure>,
}

impl AdaptedReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Tests `(E - k) J^k ⊆ J^{k+1}` for `0 ≤ k ≤ q` on the monomials of total degree ≤ D
/// spanning `J^k`, smallest monomials first.
///
/// Without a presentation the test runs in the free algebra (J^{k+1} = odd weight ≥ k+1).
/// With one, images are truncated at D and tested against the preimage of J^{k+1} in
/// the quotient (the ideal plus odd weight ≥ k+1), using the presentation's relations at
/// truncation D.
pub fn adapted_check(e: &SuperDerivation, pres: Option<&Presentation>, max_degree: u32) -> Result<AdaptedReport> {
    if e.parity() != Parity::Even {
        return Err(KernelError::argument("adaptedness is only defined for even derivations"));
    }
    let sig = e.signature();
    let pres = match pres {
        Some(p) => {
            if p.signature() != sig {
                return Err(KernelError::argument("derivation and presentation use different algebras"));
            }
            Some(p.with_bounds(p.coeff_degree().min(max_degree), max_degree)?)
        }
        None => None,
    };
    let mut monos = Monomial::all_up_to(sig, max_degree);
    monos.sort_by(|a, b| (a.total_degree(), a.mask, &a.exp).cmp(&(b.total_degree(), b.mask, &b.exp)));
    let mut report = AdaptedReport { max_degree, checked: 0, failure: None };
    for k in 0..=sig.q() as u32 {
        let upper = pres.as_ref().map(|p| p.filtration_span(k + 1));
        let kk = BigRational::from_integer(BigInt::from(k));
        for m in monos.iter().filter(|m| m.weight() >= k) {
            let x = GrassmannElement::monomial(sig, m, BigRational::one());
            let image = &e.apply(&x)? - &x.scale(&kk);
            report.checked += 1;
            let ok = match &upper {
                Some(span) => span.contains_truncated(&image),
                None => image.jk_test(k + 1),
            };
            if !ok {
                let image = if upper.is_some() { image.truncate(max_degree) } else { image };
                report.failure = Some(AdaptedFailure { k, witness: x, image });
                return Ok(report);
            }
        }
    }
    Ok(report)
}
