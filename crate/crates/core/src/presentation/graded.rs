use num_rational::BigRational;
use num_traits::One;

use super::quotient::Presentation;
use super::span::SpanLabel;
use crate::grassmann::{GrassmannElement, Monomial};

/// The graded piece `J^k / J^{k+1}` of a truncated presentation.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GradedPiece {
    pub k: u32,
    /// Monomial representatives of a vector-space basis of `J^k / J^{k+1}`.
    pub basis: Vec<GrassmannElement>,
    /// Monomial representatives of a minimal generating set over the reduced ring at the
    /// origin, i.e. a basis of `J^k / (J^{k+1} + m·J^k)` with `m = (x1..xp)`.
    pub generators: Vec<GrassmannElement>,
}

impl GradedPiece {
    /// Number of module generators (the rank of a free graded piece).
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }
}

/// Computes `Gr^(k) = J^k / J^{k+1}` inside the truncated quotient. For `k = 1` this is the
/// fermionic module.
pub fn graded_basis(pres: &Presentation, k: u32) -> GradedPiece {
    let sig = pres.signature();
    let upper = pres.filtration_span(k + 1);
    let index = upper.index().clone();
    let level: Vec<Monomial> = {
        let mut v: Vec<Monomial> = index.monomials().iter().filter(|m| m.weight() == k).cloned().collect();
        v.sort_by(|a, b| (a.total_degree(), &a.exp, a.mask).cmp(&(b.total_degree(), &b.exp, b.mask)));
        v
    };
    let elem = |m: &Monomial| GrassmannElement::monomial(sig, m, BigRational::one());

    let mut space = upper.clone();
    let basis = level
        .iter()
        .filter(|m| space.add_element(&elem(m), SpanLabel::Monomial((*m).clone())))
        .map(elem)
        .collect();

    let mut module = upper;
    for m in &level {
        for i in 0..sig.p() {
            let xm = &GrassmannElement::even_generator(sig, i) * &elem(m);
            module.add_element(&xm, SpanLabel::Monomial(m.clone()));
        }
    }
    let generators = level
        .iter()
        .filter(|m| module.add_element(&elem(m), SpanLabel::Monomial((*m).clone())))
        .map(elem)
        .collect();
    GradedPiece { k, basis, generators }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::AlgebraSignature;

    #[test]
    fn free_algebra_has_binomial_ranks() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let p = Presentation::free(&s, 2, 4).unwrap();
        let g1 = graded_basis(&p, 1);
        assert_eq!(g1.generators, vec![GrassmannElement::odd_generator(&s, 0), GrassmannElement::odd_generator(&s, 1)]);
        assert_eq!(graded_basis(&p, 2).rank(), 1);
        assert!(graded_basis(&p, 3).is_zero());
    }

    #[test]
    fn quotient_example_has_rank_one_top_piece() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let x = GrassmannElement::even_generator(&s, 0);
        let t12 = &GrassmannElement::odd_generator(&s, 0) * &GrassmannElement::odd_generator(&s, 1);
        let p = Presentation::new(&s, vec![&(&x * &x) + &t12], 4, 6).unwrap();
        let g2 = graded_basis(&p, 2);
        assert_eq!(g2.generators, vec![t12.clone()]);
        assert_eq!(g2.basis, vec![t12.clone(), &x * &t12]);
        assert_eq!(graded_basis(&p, 1).rank(), 2);
        assert_eq!(graded_basis(&p, 0).rank(), 1);
    }
}
