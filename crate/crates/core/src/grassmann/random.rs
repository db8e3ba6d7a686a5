//! Seeded generators of random elements, shared by the randomized checks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use super::element::GrassmannElement;
use super::signature::{Parity, Signature};
use crate::coeff::{Exponent, Polynomial};

/// Small nonzero rational with numerator in [-5, 5] and denominator in [1, 3].
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    loop {
        let n: i64 = rng.gen_range(-5..=5);
        if n != 0 {
            let d: i64 = rng.gen_range(1..=3);
            return BigRational::new(BigInt::from(n), BigInt::from(d));
        }
    }
}

/// Random polynomial in `nvars` variables with degree ≤ `max_degree` and at most `terms` terms.
pub fn random_polynomial<R: Rng + ?Sized>(rng: &mut R, nvars: usize, max_degree: u32, terms: usize) -> Polynomial {
    let exps = Exponent::all_up_to(nvars, max_degree);
    let mut p = Polynomial::zero(nvars);
    for _ in 0..terms {
        let e = exps[rng.gen_range(0..exps.len())].clone();
        p.add_term(e, small_rational(rng));
    }
    p
}

/// Random element over `sig`. With `parity`, only odd masks of that parity are used.
/// Coefficients have polynomial degree ≤ `max_degree`.
pub fn random_element<R: Rng + ?Sized>(
    rng: &mut R,
    sig: &Signature,
    parity: Option<Parity>,
    max_degree: u32,
    terms: usize,
) -> GrassmannElement {
    let masks: Vec<u64> = (0..=sig.full_mask())
        .filter(|m| parity.is_none_or(|p| Parity::of_weight(m.count_ones()) == p))
        .collect();
    let mut out = GrassmannElement::zero(sig);
    if masks.is_empty() {
        return out;
    }
    for _ in 0..terms {
        let mask = masks[rng.gen_range(0..masks.len())];
        let n = 1 + rng.gen_range(0..2);
        let coeff = random_polynomial(rng, sig.p(), max_degree, n);
        out += &GrassmannElement::from_terms(sig, [(mask, coeff)]);
    }
    out
}
