use std::fmt;

use num_rational::BigRational;

use super::element::GrassmannElement;
use super::signature::{Parity, Signature};
use crate::coeff::Polynomial;
use crate::error::{KernelError, Result};
use crate::linalg;

/// A superring morphism between free Grassmann algebras, given by the images of the
/// source generators. Even generators go to even elements and odd generators to odd ones;
/// the morphism extends multiplicatively (polynomial coefficients are evaluated at the
/// even images).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Morphism {
    source: Signature,
    target: Signature,
    even_images: Vec<GrassmannElement>,
    odd_images: Vec<GrassmannElement>,
}

/// First generator on which two morphisms disagree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MorphismMismatch {
    pub generator: String,
    pub left: GrassmannElement,
    pub right: GrassmannElement,
}

impl Morphism {
    pub fn new(
        source: &Signature,
        target: &Signature,
        even_images: Vec<GrassmannElement>,
        odd_images: Vec<GrassmannElement>,
    ) -> Result<Self> {
        if even_images.len() != source.p() || odd_images.len() != source.q() {
            return Err(KernelError::argument(format!(
                "a morphism out of a {} algebra needs {} even and {} odd images",
                source,
                source.p(),
                source.q()
            )));
        }
        for (i, img) in even_images.iter().enumerate() {
            if img.signature() != target {
                return Err(KernelError::argument("generator image lives in the wrong algebra"));
            }
            if !img.has_parity(Parity::Even) {
                return Err(KernelError::Parity(format!(
                    "image of even generator {} is not even",
                    source.even_names()[i]
                )));
            }
        }
        for (j, img) in odd_images.iter().enumerate() {
            if img.signature() != target {
                return Err(KernelError::argument("generator image lives in the wrong algebra"));
            }
            if !img.has_parity(Parity::Odd) {
                return Err(KernelError::Parity(format!(
                    "image of odd generator {} is not odd",
                    source.odd_names()[j]
                )));
            }
        }
        Ok(Morphism {
            source: source.clone(),
            target: target.clone(),
            even_images,
            odd_images,
        })
    }

    pub fn identity(sig: &Signature) -> Self {
        Morphism {
            source: sig.clone(),
            target: sig.clone(),
            even_images: (0..sig.p()).map(|i| GrassmannElement::even_generator(sig, i)).collect(),
            odd_images: (0..sig.q()).map(|j| GrassmannElement::odd_generator(sig, j)).collect(),
        }
    }

    pub fn source(&self) -> &Signature {
        &self.source
    }

    pub fn target(&self) -> &Signature {
        &self.target
    }

    pub fn even_images(&self) -> &[GrassmannElement] {
        &self.even_images
    }

    pub fn odd_images(&self) -> &[GrassmannElement] {
        &self.odd_images
    }

    /// (generator name, image) pairs, even generators first.
    pub fn images(&self) -> impl Iterator<Item = (&str, &GrassmannElement)> {
        self.source
            .even_names()
            .iter()
            .zip(&self.even_images)
            .chain(self.source.odd_names().iter().zip(&self.odd_images))
            .map(|(n, e)| (n.as_str(), e))
    }

    pub fn apply(&self, a: &GrassmannElement) -> Result<GrassmannElement> {
        if a.signature() != &self.source {
            return Err(KernelError::argument("element is not in the morphism's source algebra"));
        }
        let mut powers: Vec<Vec<GrassmannElement>> =
            vec![vec![GrassmannElement::one(&self.target)]; self.source.p()];
        let mut out = GrassmannElement::zero(&self.target);
        for (mask, poly) in a.terms() {
            let mut value = GrassmannElement::zero(&self.target);
            for (e, c) in poly.terms() {
                let mut term = GrassmannElement::constant(&self.target, c.clone());
                for (i, &k) in e.as_slice().iter().enumerate() {
                    if k == 0 {
                        continue;
                    }
                    while powers[i].len() <= k as usize {
                        let next = powers[i].last().unwrap() * &self.even_images[i];
                        powers[i].push(next);
                    }
                    term = &term * &powers[i][k as usize];
                }
                value += &term;
            }
            let mut odd = GrassmannElement::one(&self.target);
            for j in 0..self.source.q() {
                if mask & (1 << j) != 0 {
                    odd = &odd * &self.odd_images[j];
                }
            }
            out += &(&value * &odd);
        }
        Ok(out)
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Morphism) -> Result<Morphism> {
        if next.source != self.target {
            return Err(KernelError::argument("morphisms are not composable"));
        }
        Ok(Morphism {
            source: self.source.clone(),
            target: next.target.clone(),
            even_images: self.even_images.iter().map(|e| next.apply(e)).collect::<Result<_>>()?,
            odd_images: self.odd_images.iter().map(|e| next.apply(e)).collect::<Result<_>>()?,
        })
    }

    /// First generator where the images differ.
    pub fn mismatch(&self, other: &Morphism) -> Option<MorphismMismatch> {
        self.images()
            .zip(other.images())
            .find(|((_, a), (_, b))| a != b)
            .map(|((name, a), (_, b))| MorphismMismatch {
                generator: name.to_string(),
                left: a.clone(),
                right: b.clone(),
            })
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.mismatch(&Morphism::identity(&self.source)).is_none()
    }

    /// The induced morphism of associated graded algebras: even generators go to the
    /// bodies of their images, odd generators to the weight-1 parts.
    pub fn graded(&self) -> Morphism {
        Morphism {
            source: self.source.clone(),
            target: self.target.clone(),
            even_images: self.even_images.iter().map(|e| e.weight_component(0)).collect(),
            odd_images: self.odd_images.iter().map(|e| e.weight_component(1)).collect(),
        }
    }

    /// Two-sided inverse of a morphism whose reduced part is the identity
    /// (x_i ↦ x_i + nilpotent) and whose linear odd part θ ↦ Mθ has a constant invertible
    /// matrix M. Solved by fixed-point iteration along the J-adic filtration, then
    /// verified exactly on both sides.
    pub fn inverse(&self) -> Result<Morphism> {
        let sig = &self.source;
        if !sig.same_shape(&self.target) {
            return Err(KernelError::argument("only morphisms between equal dimensions are invertible"));
        }
        let tgt = &self.target;
        let (p, q) = (sig.p(), sig.q());
        for (i, img) in self.even_images.iter().enumerate() {
            if img.body() != Polynomial::var(p, i) {
                return Err(KernelError::argument(format!(
                    "cannot invert: the reduced image of {} is not the identity",
                    sig.even_names()[i]
                )));
            }
        }
        let mut matrix = vec![vec![BigRational::default(); q]; q];
        for (j, img) in self.odd_images.iter().enumerate() {
            let lin = img.weight_component(1);
            for (mask, coeff) in lin.terms() {
                let k = mask.trailing_zeros() as usize;
                matrix[j][k] = coeff.constant_value().ok_or_else(|| {
                    KernelError::argument("cannot invert: the odd linear part is not constant")
                })?;
            }
        }
        let minv = linalg::invert(&matrix)
            .ok_or_else(|| KernelError::argument("cannot invert: the odd linear part is singular"))?;

        // ψ : target → source
        let lin_inv_images: Vec<GrassmannElement> = (0..q)
            .map(|k| {
                let mut e = GrassmannElement::zero(sig);
                for (l, c) in minv[k].iter().enumerate() {
                    e += &GrassmannElement::odd_generator(sig, l).scale(c);
                }
                e
            })
            .collect();
        let mut psi = Morphism {
            source: tgt.clone(),
            target: sig.clone(),
            even_images: (0..p).map(|i| GrassmannElement::even_generator(sig, i)).collect(),
            odd_images: lin_inv_images,
        };
        // higher-order parts of φ, as elements of the target algebra
        let even_rest: Vec<GrassmannElement> = self
            .even_images
            .iter()
            .enumerate()
            .map(|(i, e)| e - &GrassmannElement::even_generator(tgt, i))
            .collect();
        let odd_rest: Vec<GrassmannElement> = self
            .odd_images
            .iter()
            .map(|e| e - &e.weight_component(1))
            .collect();
        for _ in 0..=q + 1 {
            let mut even = Vec::with_capacity(p);
            for (i, rest) in even_rest.iter().enumerate() {
                even.push(&GrassmannElement::even_generator(sig, i) - &psi.apply(rest)?);
            }
            let mut odd = Vec::with_capacity(q);
            let corrected: Vec<GrassmannElement> = (0..q)
                .map(|j| Ok(&GrassmannElement::odd_generator(sig, j) - &psi.apply(&odd_rest[j])?))
                .collect::<Result<_>>()?;
            for row in &minv {
                let mut e = GrassmannElement::zero(sig);
                for (l, c) in row.iter().enumerate() {
                    e += &corrected[l].scale(c);
                }
                odd.push(e);
            }
            let next = Morphism {
                source: tgt.clone(),
                target: sig.clone(),
                even_images: even,
                odd_images: odd,
            };
            if next == psi {
                break;
            }
            psi = next;
        }
        if !self.then(&psi)?.is_identity() || !psi.then(self)?.is_identity() {
            return Err(KernelError::argument("inverse iteration did not converge"));
        }
        Ok(psi)
    }

    pub fn to_text(&self) -> String {
        self.images()
            .map(|(n, e)| format!("{n} -> {e}"))
            .collect::<Vec<_>>()
            .join("; ")
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{ {} }}", self.to_text())
    }
}
