use std::fmt;
use std::sync::{Arc, OnceLock};

use num_rational::BigRational;

use super::span::{MonomialIndex, SpanBasis, SpanLabel};
use crate::error::{KernelError, Result};
use crate::grassmann::{AlgebraSignature, GrassmannElement, Monomial, Signature};

/// A finitely presented superring `free(p|q) / (relations)`, computed modulo every term of
/// total degree above `D`. `d` bounds the polynomial degree of unknown coefficients in
/// the split search.
#[derive(Clone, Debug)]
pub struct Presentation {
    sig: Signature,
    relations: Vec<GrassmannElement>,
    d: u32,
    big_d: u32,
    ideal: OnceLock<Arc<SpanBasis>>,
}

impl PartialEq for Presentation {
    fn eq(&self, other: &Self) -> bool {
        self.sig == other.sig && self.relations == other.relations && self.d == other.d && self.big_d == other.big_d
    }
}

impl Eq for Presentation {}

/// One term `coeff · truncate_D(multiplier · relation)` of a membership certificate.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CertificateTerm {
    pub multiplier: Monomial,
    pub relation: usize,
    pub coeff: BigRational,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Membership {
    pub member: bool,
    pub certificate: Option<Vec<CertificateTerm>>,
}

/// Coefficient degree bound used when none is given.
pub const DEFAULT_COEFF_DEGREE: u32 = 2;
/// Smallest truncation degree used when none is given.
pub const DEFAULT_TRUNCATION: u32 = 4;

impl Presentation {
    pub fn new(sig: &Signature, relations: Vec<GrassmannElement>, d: u32, big_d: u32) -> Result<Self> {
        for (i, r) in relations.iter().enumerate() {
            if r.signature() != sig {
                return Err(KernelError::argument(format!("relation {} lives in another algebra", i + 1)));
            }
            if r.is_zero() {
                return Err(KernelError::argument(format!("relation {} is zero", i + 1)));
            }
            if !r.is_homogeneous() {
                return Err(KernelError::Parity(format!("relation {} is not parity-homogeneous: {r}", i + 1)));
            }
            let deg = r.total_degree().unwrap_or(0);
            if deg > big_d {
                return Err(KernelError::Truncation { degree: deg, bound: big_d });
            }
        }
        if d > big_d {
            return Err(KernelError::argument(format!("coefficient degree d={d} exceeds truncation D={big_d}")));
        }
        Ok(Presentation { sig: sig.clone(), relations, d, big_d, ideal: OnceLock::new() })
    }

    /// Presentation with the default bounds `d = 2`, `D = max(4, max relation degree)`.
    pub fn with_default_bounds(sig: &Signature, relations: Vec<GrassmannElement>) -> Result<Self> {
        let max_rel = relations.iter().filter_map(GrassmannElement::total_degree).max().unwrap_or(0);
        let big_d = DEFAULT_TRUNCATION.max(max_rel);
        Self::new(sig, relations, DEFAULT_COEFF_DEGREE.min(big_d), big_d)
    }

    pub fn free(sig: &Signature, d: u32, big_d: u32) -> Result<Self> {
        Self::new(sig, Vec::new(), d, big_d)
    }

    pub fn with_bounds(&self, d: u32, big_d: u32) -> Result<Self> {
        Self::new(&self.sig, self.relations.clone(), d, big_d)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn relations(&self) -> &[GrassmannElement] {
        &self.relations
    }

    pub fn is_free(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn coeff_degree(&self) -> u32 {
        self.d
    }

    pub fn truncation(&self) -> u32 {
        self.big_d
    }

    /// The row-reduced span of the truncated ideal.
    pub fn ideal_span(&self) -> &Arc<SpanBasis> {
        self.ideal.get_or_init(|| {
            let index = Arc::new(MonomialIndex::new(&self.sig, self.big_d));
            Arc::new(SpanBasis::ideal(index, &self.relations))
        })
    }

    /// Preimage of `J^k` in the truncated free algebra: the ideal plus all monomials of
    /// odd weight ≥ k.
    pub fn filtration_span(&self, k: u32) -> SpanBasis {
        let mut span = (**self.ideal_span()).clone();
        span.add_weight_at_least(k);
        span
    }

    pub fn member(&self, f: &GrassmannElement) -> Result<Membership> {
        self.check_element(f)?;
        let certificate = self.ideal_span().express(f)?.map(|combo| {
            combo
                .into_iter()
                .filter_map(|(label, coeff)| match label {
                    SpanLabel::Multiple { multiplier, relation } => Some(CertificateTerm { multiplier, relation, coeff }),
                    SpanLabel::Monomial(_) => None,
                })
                .collect::<Vec<_>>()
        });
        Ok(Membership { member: certificate.is_some(), certificate })
    }

    /// `Σ coeff · truncate_D(multiplier · relation)`; equals `f` for a valid certificate.
    pub fn expand_certificate(&self, certificate: &[CertificateTerm]) -> GrassmannElement {
        let mut out = GrassmannElement::zero(&self.sig);
        for t in certificate {
            let m = GrassmannElement::monomial(&self.sig, &t.multiplier, t.coeff.clone());
            out += &(&m * &self.relations[t.relation]).truncate(self.big_d);
        }
        out
    }

    pub fn normal_form(&self, f: &GrassmannElement) -> Result<GrassmannElement> {
        self.check_element(f)?;
        self.ideal_span().reduce(f)
    }

    fn check_element(&self, f: &GrassmannElement) -> Result<()> {
        if f.signature() != &self.sig {
            return Err(KernelError::argument("element lives in another algebra"));
        }
        Ok(())
    }

    /// The quotient by the canonical superideal: no odd generators, each relation replaced
    /// by its weight-0 part (relations whose body vanishes are dropped).
    pub fn reduced_presentation(&self) -> Presentation {
        let sig = AlgebraSignature::with_names(self.sig.even_names().to_vec(), Vec::new())
            .expect("even names are already valid");
        let relations = self
            .relations
            .iter()
            .map(GrassmannElement::body)
            .filter(|b| !b.is_zero())
            .map(|b| GrassmannElement::from_polynomial(&sig, b))
            .collect();
        Presentation::new(&sig, relations, self.d, self.big_d).expect("bodies keep parity and degree bounds")
    }

    /// A monomial basis of the truncated quotient ring.
    pub fn quotient_basis(&self) -> Vec<GrassmannElement> {
        self.ideal_span().complement()
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("ring p={} q={};", self.sig.p(), self.sig.q());
        for r in &self.relations {
            out.push_str(&format!(" relation {r};"));
        }
        out.push_str(&format!(" bounds d={} D={};", self.d, self.big_d));
        out
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat_int;

    fn example() -> (Signature, Presentation) {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let x = GrassmannElement::even_generator(&s, 0);
        let t12 = &GrassmannElement::odd_generator(&s, 0) * &GrassmannElement::odd_generator(&s, 1);
        let p = Presentation::new(&s, vec![&(&x * &x) + &t12], 4, 6).unwrap();
        (s, p)
    }

    #[test]
    fn x4_is_a_member_with_certificate() {
        let (s, p) = example();
        let x = GrassmannElement::even_generator(&s, 0);
        let x4 = x.pow(4);
        let m = p.member(&x4).unwrap();
        assert!(m.member);
        assert_eq!(p.expand_certificate(&m.certificate.unwrap()), x4);
        assert!(p.normal_form(&x4).unwrap().is_zero());
    }

    #[test]
    fn normal_form_of_x_squared() {
        let (s, p) = example();
        let x = GrassmannElement::even_generator(&s, 0);
        let t12 = &GrassmannElement::odd_generator(&s, 0) * &GrassmannElement::odd_generator(&s, 1);
        assert_eq!(p.normal_form(&(&x * &x)).unwrap(), -&t12);
        let t1 = GrassmannElement::odd_generator(&s, 0);
        assert_eq!(p.normal_form(&t1).unwrap(), t1);
        assert!(!p.member(&t1).unwrap().member);
    }

    #[test]
    fn relations_are_members() {
        let (_, p) = example();
        for r in p.relations() {
            assert!(p.member(r).unwrap().member);
        }
    }

    #[test]
    fn degree_overflow_is_a_truncation_error() {
        let (s, p) = example();
        let x = GrassmannElement::even_generator(&s, 0);
        assert!(matches!(p.member(&x.pow(7)), Err(KernelError::Truncation { degree: 7, bound: 6 })));
    }

    #[test]
    fn reduced_ring_of_the_example() {
        let (_, p) = example();
        let red = p.reduced_presentation();
        assert_eq!(red.signature().q(), 0);
        let s0 = red.signature().clone();
        let x = GrassmannElement::even_generator(&s0, 0);
        assert_eq!(red.relations(), &[&x * &x]);
        assert_eq!(red.quotient_basis(), vec![GrassmannElement::one(&s0), x]);
    }

    #[test]
    fn reduced_ring_drops_odd_relations() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let p = Presentation::new(&s, vec![GrassmannElement::odd_generator(&s, 0)], 2, 3).unwrap();
        let red = p.reduced_presentation();
        assert!(red.is_free());
        assert_eq!(red.quotient_basis().len(), 4);
    }

    #[test]
    fn inhomogeneous_relation_is_rejected() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let bad = &GrassmannElement::even_generator(&s, 0) + &GrassmannElement::odd_generator(&s, 0);
        assert!(matches!(Presentation::new(&s, vec![bad], 2, 4), Err(KernelError::Parity(_))));
        assert!(Presentation::new(&s, vec![GrassmannElement::constant(&s, rat_int(0))], 2, 4).is_err());
    }
}
