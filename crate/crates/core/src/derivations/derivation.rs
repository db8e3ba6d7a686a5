use std::fmt;

use num_rational::BigRational;
use num_traits::One;

use crate::grassmann::{GrassmannElement, Parity, Signature};
use crate::error::{KernelError, Result};

/// A homogeneous superderivation `Σ a_i ∂/∂x_i + Σ b_j ∂/∂θ^j` of the free algebra,
/// stored by its values on the generators.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SuperDerivation {
    sig: Signature,
    parity: Parity,
    even_coeffs: Vec<GrassmannElement>,
    odd_coeffs: Vec<GrassmannElement>,
}

impl SuperDerivation {
    /// Builds a derivation from generator images, inferring its parity from the first
    /// nonzero coefficient (the zero derivation is even).
    pub fn new(sig: &Signature, even_coeffs: Vec<GrassmannElement>, odd_coeffs: Vec<GrassmannElement>) -> Result<Self> {
        let inferred = even_coeffs
            .iter()
            .find(|c| !c.is_zero())
            .and_then(|c| c.parity())
            .or_else(|| odd_coeffs.iter().find(|c| !c.is_zero()).and_then(|c| c.parity()).map(|p| p + Parity::Odd))
            .unwrap_or(Parity::Even);
        Self::with_parity(sig, inferred, even_coeffs, odd_coeffs)
    }

    pub fn with_parity(
        sig: &Signature,
        parity: Parity,
        even_coeffs: Vec<GrassmannElement>,
        odd_coeffs: Vec<GrassmannElement>,
    ) -> Result<Self> {
        if even_coeffs.len() != sig.p() || odd_coeffs.len() != sig.q() {
            return Err(KernelError::argument(format!(
                "a derivation of a {sig} algebra needs {} even and {} odd coefficients",
                sig.p(),
                sig.q()
            )));
        }
        for (name, c) in sig.even_names().iter().zip(&even_coeffs) {
            if c.signature() != sig {
                return Err(KernelError::argument("derivation coefficient lives in another algebra"));
            }
            if !c.has_parity(parity) {
                return Err(KernelError::Parity(format!(
                    "coefficient of d/d{name} does not have parity {parity}"
                )));
            }
        }
        for (name, c) in sig.odd_names().iter().zip(&odd_coeffs) {
            if c.signature() != sig {
                return Err(KernelError::argument("derivation coefficient lives in another algebra"));
            }
            if !c.has_parity(parity + Parity::Odd) {
                return Err(KernelError::Parity(format!(
                    "coefficient of d/d{name} does not have parity {}",
                    parity + Parity::Odd
                )));
            }
        }
        Ok(SuperDerivation { sig: sig.clone(), parity, even_coeffs, odd_coeffs })
    }

    pub fn zero(sig: &Signature, parity: Parity) -> Self {
        SuperDerivation {
            sig: sig.clone(),
            parity,
            even_coeffs: vec![GrassmannElement::zero(sig); sig.p()],
            odd_coeffs: vec![GrassmannElement::zero(sig); sig.q()],
        }
    }

    /// ∂/∂x_{i+1}.
    pub fn partial_even(sig: &Signature, i: usize) -> Self {
        let mut d = Self::zero(sig, Parity::Even);
        d.even_coeffs[i] = GrassmannElement::one(sig);
        d
    }

    /// ∂/∂θ^{j+1}.
    pub fn partial_odd(sig: &Signature, j: usize) -> Self {
        let mut d = Self::zero(sig, Parity::Odd);
        d.odd_coeffs[j] = GrassmannElement::one(sig);
        d
    }

    /// The Euler vector field `Σ θ^j ∂/∂θ^j`.
    pub fn euler_field(sig: &Signature) -> Self {
        let mut d = Self::zero(sig, Parity::Even);
        for j in 0..sig.q() {
            d.odd_coeffs[j] = GrassmannElement::odd_generator(sig, j);
        }
        d
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn even_coeffs(&self) -> &[GrassmannElement] {
        &self.even_coeffs
    }

    pub fn odd_coeffs(&self) -> &[GrassmannElement] {
        &self.odd_coeffs
    }

    /// (generator name, coefficient) pairs, even generators first.
    pub fn coefficients(&self) -> impl Iterator<Item = (&str, &GrassmannElement)> {
        self.sig
            .even_names()
            .iter()
            .zip(&self.even_coeffs)
            .chain(self.sig.odd_names().iter().zip(&self.odd_coeffs))
            .map(|(n, c)| (n.as_str(), c))
    }

    pub fn is_zero(&self) -> bool {
        self.even_coeffs.iter().chain(&self.odd_coeffs).all(GrassmannElement::is_zero)
    }

    /// `D(a) = Σ a_i ∂a/∂x_i + Σ b_j ∂a/∂θ^j`.
    pub fn apply(&self, a: &GrassmannElement) -> Result<GrassmannElement> {
        if a.signature() != &self.sig {
            return Err(KernelError::argument("element and derivation live in different algebras"));
        }
        let mut out = GrassmannElement::zero(&self.sig);
        for (i, c) in self.even_coeffs.iter().enumerate() {
            if !c.is_zero() {
                out += &(c * &a.even_derivative(i)?);
            }
        }
        for (j, c) in self.odd_coeffs.iter().enumerate() {
            if !c.is_zero() {
                out += &(c * &a.odd_derivative(j)?);
            }
        }
        Ok(out)
    }

    pub fn try_add(&self, other: &SuperDerivation) -> Result<SuperDerivation> {
        if self.sig != other.sig {
            return Err(KernelError::argument("derivations live in different algebras"));
        }
        let parity = if self.is_zero() {
            other.parity
        } else if other.is_zero() || other.parity == self.parity {
            self.parity
        } else {
            return Err(KernelError::Parity("cannot add derivations of different parity".into()));
        };
        Ok(SuperDerivation {
            sig: self.sig.clone(),
            parity,
            even_coeffs: self.even_coeffs.iter().zip(&other.even_coeffs).map(|(a, b)| a + b).collect(),
            odd_coeffs: self.odd_coeffs.iter().zip(&other.odd_coeffs).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn scale(&self, c: &BigRational) -> SuperDerivation {
        self.map_coeffs(|e| e.scale(c))
    }

    /// Multiplies every coefficient on the left by an even element.
    pub fn mul_left(&self, f: &GrassmannElement) -> Result<SuperDerivation> {
        if !f.has_parity(Parity::Even) {
            return Err(KernelError::Parity("derivations are only rescaled by even elements".into()));
        }
        Ok(self.map_coeffs(|e| f * e))
    }

    /// Keeps the coefficient terms of odd weight `k`.
    pub fn weight_component(&self, k: u32) -> SuperDerivation {
        self.map_coeffs(|e| e.weight_component(k))
    }

    pub fn truncate(&self, max_degree: u32) -> SuperDerivation {
        self.map_coeffs(|e| e.truncate(max_degree))
    }

    fn map_coeffs(&self, f: impl Fn(&GrassmannElement) -> GrassmannElement) -> SuperDerivation {
        SuperDerivation {
            sig: self.sig.clone(),
            parity: self.parity,
            even_coeffs: self.even_coeffs.iter().map(&f).collect(),
            odd_coeffs: self.odd_coeffs.iter().map(&f).collect(),
        }
    }

    /// Text form `t1*d/dt1 + (x1 + t1*t2)*d/dx1`; `0` for the zero derivation.
    pub fn to_text(&self) -> String {
        let mut parts = Vec::new();
        for (name, c) in self.coefficients() {
            if c.is_zero() {
                continue;
            }
            let text = c.to_string();
            let op = format!("d/d{name}");
            if c == &GrassmannElement::one(&self.sig) {
                parts.push(op);
            } else if is_plain_product(&text) {
                parts.push(format!("{text}*{op}"));
            } else {
                parts.push(format!("({text})*{op}"));
            }
        }
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
}

fn is_plain_product(text: &str) -> bool {
    !text.contains(' ') && !text.starts_with('-') && !text.contains('/')
}

impl fmt::Display for SuperDerivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Builds `Σ c_k · D_k` from a basis of derivations; used by the linear solvers.
pub(crate) fn combine(sig: &Signature, parity: Parity, parts: &[(BigRational, &SuperDerivation)]) -> SuperDerivation {
    let mut acc = SuperDerivation::zero(sig, parity);
    for (c, d) in parts {
        if c.is_one() {
            acc = acc.try_add(d).expect("basis derivations share a parity");
        } else {
            acc = acc.try_add(&d.scale(c)).expect("basis derivations share a parity");
        }
    }
    acc
}
