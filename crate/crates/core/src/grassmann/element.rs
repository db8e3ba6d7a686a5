use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_rational::BigRational;
use num_traits::One;

use super::signature::{AlgebraSignature, Parity, Signature};
use crate::coeff::polynomial::{format_term, join_terms, monomial_factors};
use crate::coeff::{Exponent, Polynomial};
use crate::error::{KernelError, Result};

/// Sign of θ^A·θ^B relative to the sorted monomial θ^{A∪B}; zero when A ∩ B ≠ ∅.
///
/// Counts the inversions, i.e. pairs (i, j) ∈ A × B with i > j.
pub fn reorder_sign(a: u64, b: u64) -> i64 {
    if a & b != 0 {
        return 0;
    }
    let mut inversions = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        inversions += (a >> j).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// A basis monomial x^e θ^I.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Monomial {
    pub exp: Exponent,
    pub mask: u64,
}

impl Monomial {
    pub fn new(exp: Exponent, mask: u64) -> Self {
        Monomial { exp, mask }
    }

    pub fn weight(&self) -> u32 {
        self.mask.count_ones()
    }

    /// Polynomial degree plus odd weight.
    pub fn total_degree(&self) -> u32 {
        self.exp.degree() + self.weight()
    }

    /// Every monomial over `sig` with total degree ≤ `max_degree`.
    pub fn all_up_to(sig: &AlgebraSignature, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for mask in 0..=sig.full_mask() {
            let w = mask.count_ones();
            if w > max_degree {
                continue;
            }
            for exp in Exponent::all_up_to(sig.p(), max_degree - w) {
                out.push(Monomial { exp, mask });
            }
        }
        out
    }
}

/// An element Σ_I f_I θ^I of the free Grassmann algebra.
///
/// Canonical: no stored coefficient is the zero polynomial and every mask fits in `q` bits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GrassmannElement {
    sig: Signature,
    terms: BTreeMap<u64, Polynomial>,
}

impl GrassmannElement {
    pub fn zero(sig: &Signature) -> Self {
        GrassmannElement {
            sig: sig.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(sig: &Signature) -> Self {
        Self::from_polynomial(sig, Polynomial::one(sig.p()))
    }

    pub fn constant(sig: &Signature, c: BigRational) -> Self {
        Self::from_polynomial(sig, Polynomial::constant(sig.p(), c))
    }

    pub fn from_polynomial(sig: &Signature, poly: Polynomial) -> Self {
        let mut e = Self::zero(sig);
        e.add_poly_at(0, &poly);
        e
    }

    /// The even generator `x_{i+1}`.
    pub fn even_generator(sig: &Signature, i: usize) -> Self {
        Self::from_polynomial(sig, Polynomial::var(sig.p(), i))
    }

    /// The odd generator `θ^{j+1}`.
    pub fn odd_generator(sig: &Signature, j: usize) -> Self {
        assert!(j < sig.q(), "odd generator index out of range");
        Self::monomial(sig, &Monomial::new(Exponent::zero(sig.p()), 1 << j), BigRational::one())
    }

    pub fn monomial(sig: &Signature, m: &Monomial, c: BigRational) -> Self {
        assert!(m.mask & !sig.full_mask() == 0, "odd mask exceeds q");
        let mut e = Self::zero(sig);
        e.add_poly_at(m.mask, &Polynomial::monomial(sig.p(), m.exp.clone(), c));
        e
    }

    /// Builds `Σ coeff · θ^mask` from (mask, coefficient) pairs.
    pub fn from_terms(sig: &Signature, terms: impl IntoIterator<Item = (u64, Polynomial)>) -> Self {
        let mut e = Self::zero(sig);
        for (mask, poly) in terms {
            assert!(mask & !sig.full_mask() == 0, "odd mask exceeds q");
            e.add_poly_at(mask, &poly);
        }
        e
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    fn add_poly_at(&mut self, mask: u64, poly: &Polynomial) {
        if poly.is_zero() {
            return;
        }
        assert_eq!(poly.nvars(), self.sig.p(), "coefficient ring mismatch");
        match self.terms.get_mut(&mask) {
            Some(c) => {
                *c += poly;
                if c.is_zero() {
                    self.terms.remove(&mask);
                }
            }
            None => {
                self.terms.insert(mask, poly.clone());
            }
        }
    }

    pub fn add_monomial(&mut self, m: &Monomial, c: BigRational) {
        self.add_poly_at(m.mask, &Polynomial::monomial(self.sig.p(), m.exp.clone(), c));
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// (mask, coefficient) pairs in ascending mask order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Polynomial)> {
        self.terms.iter().map(|(&m, p)| (m, p))
    }

    pub fn coefficient(&self, mask: u64) -> Polynomial {
        self.terms
            .get(&mask)
            .cloned()
            .unwrap_or_else(|| Polynomial::zero(self.sig.p()))
    }

    /// Expanded basis monomials with their rational coefficients.
    pub fn monomials(&self) -> impl Iterator<Item = (Monomial, &BigRational)> {
        self.terms.iter().flat_map(|(&mask, poly)| {
            poly.terms().map(move |(e, c)| (Monomial::new(e.clone(), mask), c))
        })
    }

    /// The parity of a nonzero homogeneous element; `None` for zero or mixed elements.
    pub fn parity(&self) -> Option<Parity> {
        let mut it = self.terms.keys().map(|m| Parity::of_weight(m.count_ones()));
        let first = it.next()?;
        it.all(|p| p == first).then_some(first)
    }

    /// True for zero and for nonzero elements of a single parity.
    pub fn is_homogeneous(&self) -> bool {
        self.is_zero() || self.parity().is_some()
    }

    /// Zero counts as both even and odd.
    pub fn has_parity(&self, p: Parity) -> bool {
        self.terms.keys().all(|m| Parity::of_weight(m.count_ones()) == p)
    }

    /// The sum of all terms θ^I with |I| = k.
    pub fn weight_component(&self, k: u32) -> GrassmannElement {
        GrassmannElement {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.count_ones() == k)
                .map(|(&m, p)| (m, p.clone()))
                .collect(),
        }
    }

    /// Sum of the components of the given parity.
    pub fn parity_component(&self, p: Parity) -> GrassmannElement {
        GrassmannElement {
            sig: self.sig.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| Parity::of_weight(m.count_ones()) == p)
                .map(|(&m, c)| (m, c.clone()))
                .collect(),
        }
    }

    /// The weight-0 coefficient.
    pub fn body(&self) -> Polynomial {
        self.coefficient(0)
    }

    /// Membership in J^k of the free algebra: every term has |I| ≥ k.
    pub fn jk_test(&self, k: u32) -> bool {
        self.terms.keys().all(|m| m.count_ones() >= k)
    }

    pub fn min_weight(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.count_ones()).min()
    }

    /// Largest total degree (polynomial degree + odd weight) over all terms.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms
            .iter()
            .filter_map(|(m, p)| p.degree().map(|d| d + m.count_ones()))
            .max()
    }

    /// Drops every monomial of total degree above `max_degree`.
    pub fn truncate(&self, max_degree: u32) -> GrassmannElement {
        let mut out = Self::zero(&self.sig);
        for (&m, p) in &self.terms {
            let w = m.count_ones();
            if w <= max_degree {
                out.add_poly_at(m, &p.truncate(max_degree - w));
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> GrassmannElement {
        let mut out = Self::zero(&self.sig);
        for (&m, p) in &self.terms {
            out.add_poly_at(m, &p.scale(c));
        }
        out
    }

    /// Multiplication by an even coefficient polynomial.
    pub fn mul_poly(&self, f: &Polynomial) -> GrassmannElement {
        let mut out = Self::zero(&self.sig);
        for (&m, p) in &self.terms {
            out.add_poly_at(m, &(p * f));
        }
        out
    }

    fn check_same(&self, other: &GrassmannElement) -> Result<()> {
        if std::sync::Arc::ptr_eq(&self.sig, &other.sig) || self.sig == other.sig {
            Ok(())
        } else {
            Err(KernelError::argument(format!(
                "signature mismatch: {} vs {}",
                self.sig, other.sig
            )))
        }
    }

    /// The graded product.
    pub fn gmul(&self, other: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_same(other)?;
        let mut out = Self::zero(&self.sig);
        for (&ma, pa) in &self.terms {
            for (&mb, pb) in &other.terms {
                let s = reorder_sign(ma, mb);
                if s == 0 {
                    continue;
                }
                let prod = pa * pb;
                let prod = if s < 0 { -&prod } else { prod };
                out.add_poly_at(ma | mb, &prod);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (&m, p) in &other.terms {
            out.add_poly_at(m, p);
        }
        Ok(out)
    }

    pub fn pow(&self, n: u32) -> GrassmannElement {
        let mut acc = Self::one(&self.sig);
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// ∂/∂x_{i+1}, applied coefficientwise.
    pub fn even_derivative(&self, i: usize) -> Result<GrassmannElement> {
        let mut out = Self::zero(&self.sig);
        for (&m, p) in &self.terms {
            out.add_poly_at(m, &p.partial_derivative(i)?);
        }
        Ok(out)
    }

    /// The left derivative ∂/∂θ^{j+1}: removes θ^{j+1} from θ^{i1}⋯θ^{ik} with sign
    /// (-1)^(r-1) where j+1 = i_r.
    pub fn odd_derivative(&self, j: usize) -> Result<GrassmannElement> {
        if j >= self.sig.q() {
            return Err(KernelError::argument(format!(
                "odd derivative index {} out of range for q = {}",
                j + 1,
                self.sig.q()
            )));
        }
        let bit = 1u64 << j;
        let below = bit - 1;
        let mut out = Self::zero(&self.sig);
        for (&m, p) in &self.terms {
            if m & bit == 0 {
                continue;
            }
            let before = (m & below).count_ones();
            let coeff = if before.is_multiple_of(2) { p.clone() } else { -p };
            out.add_poly_at(m & !bit, &coeff);
        }
        Ok(out)
    }

    /// Text form in the signature's generator names. With `unicode`, odd generators print
    /// as θ with superscript indices.
    pub fn to_text(&self, unicode: bool) -> String {
        let even = self.sig.even_names();
        let mut ordered: Vec<(&u64, &Polynomial)> = self.terms.iter().collect();
        ordered.sort_by_key(|(m, _)| (m.count_ones(), **m));
        let mut parts = Vec::new();
        for (&mask, poly) in ordered {
            let odd: Vec<String> = (0..self.sig.q())
                .filter(|j| mask & (1 << j) != 0)
                .map(|j| {
                    if unicode {
                        format!("θ{}", superscript(j + 1))
                    } else {
                        self.sig.odd_names()[j].clone()
                    }
                })
                .collect();
            for (e, c) in poly.terms().rev() {
                let mut factors = monomial_factors(e, even);
                factors.extend(odd.iter().cloned());
                parts.push(format_term(c, &factors));
            }
        }
        join_terms(parts)
    }
}

fn superscript(n: usize) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl fmt::Display for GrassmannElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text(false))
    }
}

// Operator forms panic on signature mismatch; use `gmul`/`try_add` for checked variants.

impl AddAssign<&GrassmannElement> for GrassmannElement {
    fn add_assign(&mut self, rhs: &GrassmannElement) {
        self.check_same(rhs).expect("signature mismatch");
        for (&m, p) in &rhs.terms {
            self.add_poly_at(m, p);
        }
    }
}

impl SubAssign<&GrassmannElement> for GrassmannElement {
    fn sub_assign(&mut self, rhs: &GrassmannElement) {
        self.check_same(rhs).expect("signature mismatch");
        for (&m, p) in &rhs.terms {
            self.add_poly_at(m, &-p);
        }
    }
}

impl Add for &GrassmannElement {
    type Output = GrassmannElement;
    fn add(self, rhs: &GrassmannElement) -> GrassmannElement {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &GrassmannElement {
    type Output = GrassmannElement;
    fn sub(self, rhs: &GrassmannElement) -> GrassmannElement {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &GrassmannElement {
    type Output = GrassmannElement;
    fn neg(self) -> GrassmannElement {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &GrassmannElement {
    type Output = GrassmannElement;
    fn mul(self, rhs: &GrassmannElement) -> GrassmannElement {
        self.gmul(rhs).expect("signature mismatch")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat_int as int;
    use crate::grassmann::AlgebraSignature;

    fn sig(p: usize, q: usize) -> Signature {
        AlgebraSignature::new(p, q).unwrap()
    }

    fn th(s: &Signature, j: usize) -> GrassmannElement {
        GrassmannElement::odd_generator(s, j - 1)
    }

    fn x(s: &Signature, i: usize) -> GrassmannElement {
        GrassmannElement::even_generator(s, i - 1)
    }

    #[test]
    fn single_inversion_flips_sign() {
        let s = sig(0, 2);
        assert_eq!(&th(&s, 2) * &th(&s, 1), -&(&th(&s, 1) * &th(&s, 2)));
    }

    #[test]
    fn repeated_generator_vanishes() {
        let s = sig(0, 2);
        assert!((&th(&s, 1) * &th(&s, 1)).is_zero());
    }

    #[test]
    fn inversion_count_three_generators() {
        // (θ1θ3)·θ2 = -θ1θ2θ3
        let s = sig(0, 3);
        let lhs = &(&th(&s, 1) * &th(&s, 3)) * &th(&s, 2);
        let rhs = &(&th(&s, 1) * &th(&s, 2)) * &th(&s, 3);
        assert_eq!(lhs, -&rhs);
        assert_eq!(reorder_sign(0b101, 0b010), -1);
    }

    #[test]
    fn signature_mismatch_is_an_argument_error() {
        let a = th(&sig(0, 2), 1);
        let b = th(&sig(0, 3), 1);
        assert!(matches!(a.gmul(&b), Err(KernelError::Argument(_))));
    }

    #[test]
    fn weight_components() {
        let s = sig(1, 2);
        let a = &(&x(&s, 1) + &(&x(&s, 1) * &th(&s, 1))) + &(&th(&s, 1) * &th(&s, 2)).scale(&int(3));
        assert_eq!(a.weight_component(2), (&th(&s, 1) * &th(&s, 2)).scale(&int(3)));
        assert!(a.weight_component(3).is_zero());
        let s3 = sig(0, 3);
        let b = &(&(&th(&s3, 1) * &th(&s3, 2)) * &th(&s3, 3)) + &th(&s3, 1);
        assert_eq!(b.weight_component(3), &(&th(&s3, 1) * &th(&s3, 2)) * &th(&s3, 3));
    }

    #[test]
    fn jk_membership() {
        let s = sig(1, 3);
        let t12 = &th(&s, 1) * &th(&s, 2);
        assert!(t12.jk_test(2));
        assert!(!t12.jk_test(3));
        assert!(!GrassmannElement::one(&s).jk_test(1));
        assert!((&x(&s, 1) * &th(&s, 1)).jk_test(1));
    }

    #[test]
    fn odd_derivative_signs() {
        let s = sig(0, 2);
        let t12 = &th(&s, 1) * &th(&s, 2);
        assert_eq!(t12.odd_derivative(0).unwrap(), th(&s, 2));
        assert_eq!(t12.odd_derivative(1).unwrap(), -&th(&s, 1));
    }

    #[test]
    fn text_forms() {
        let s = sig(1, 3);
        let a = &(&x(&s, 1) + &(&(&x(&s, 1) * &th(&s, 1)) * &th(&s, 2)).scale(&int(2))) - &(&th(&s, 1) * &th(&s, 3));
        assert_eq!(a.to_string(), "x1 + 2*x1*t1*t2 - t1*t3");
        assert_eq!(a.to_text(true), "x1 + 2*x1*θ¹*θ² - θ¹*θ³");
        assert_eq!(GrassmannElement::zero(&s).to_string(), "0");
    }

    #[test]
    fn monomial_enumeration_counts() {
        let s = sig(1, 2);
        // total degree ≤ 2: x^0..x^2 (3) + θ1,θ2 with x^0..x^1 (4) + θ1θ2 (1)
        assert_eq!(Monomial::all_up_to(&s, 2).len(), 8);
    }
}
