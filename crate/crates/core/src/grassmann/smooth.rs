use num_rational::BigRational;
use num_traits::One;

use super::element::GrassmannElement;
use super::signature::Parity;
use crate::coeff::{factorial, Polynomial, SmoothFn};
use crate::error::{KernelError, Result};

/// The k-ary operation Φ_h on the even part of the Grassmann algebra.
///
/// Each argument splits as `F_j = f_j + n_j` into its body `f_j` (weight 0) and an even
/// nilpotent `n_j` of weight ≥ 2. The result is the full Taylor expansion
///
/// ```text
/// Φ_h(F_1..F_k) = Σ_α (∂^α h)(f_1..f_k) · n^α / α!
/// ```
///
/// which terminates at |α| ≤ ⌊q/2⌋. Compositions are applied argument-first, and atoms
/// go through their exact jets, which requires constant bodies.
pub fn apply_smooth(h: &SmoothFn, args: &[GrassmannElement]) -> Result<GrassmannElement> {
    let Some(first) = args.first() else {
        return Err(KernelError::argument("smooth operations take at least one argument"));
    };
    if h.arity() != args.len() {
        return Err(KernelError::argument(format!(
            "function of arity {} applied to {} arguments",
            h.arity(),
            args.len()
        )));
    }
    let sig = first.signature().clone();
    for (j, a) in args.iter().enumerate() {
        if a.signature() != &sig {
            return Err(KernelError::argument("arguments live in different algebras"));
        }
        if !a.has_parity(Parity::Even) {
            return Err(KernelError::Parity(format!("argument {} has odd components", j + 1)));
        }
    }
    match h {
        SmoothFn::Poly(p) => apply_polynomial(p, args),
        SmoothFn::Compose { outer, inner } => {
            let mid = inner
                .iter()
                .map(|f| apply_smooth(f, args))
                .collect::<Result<Vec<_>>>()?;
            apply_smooth(outer, &mid)
        }
        SmoothFn::Atom(_) => {
            let arg = &args[0];
            let center = arg.body().constant_value().ok_or_else(|| {
                KernelError::UnsupportedCenter(format!(
                    "{h} needs a constant body, got {}",
                    arg.body()
                ))
            })?;
            let order = (sig.q() / 2) as u32;
            let jet = h.jet_expand(&[center], order)?;
            let nil = arg - &arg.weight_component(0);
            let mut out = GrassmannElement::zero(&sig);
            let mut power = GrassmannElement::one(&sig);
            for m in 0..=order {
                let c = jet.coefficient(&crate::coeff::Exponent::from_vec(vec![m]));
                out += &power.scale(&c);
                power = &power * &nil;
            }
            Ok(out)
        }
    }
}

fn apply_polynomial(h: &Polynomial, args: &[GrassmannElement]) -> Result<GrassmannElement> {
    let sig = args[0].signature().clone();
    let k = args.len();
    let bodies: Vec<Polynomial> = args.iter().map(GrassmannElement::body).collect();
    let nils: Vec<GrassmannElement> = args.iter().map(|a| a - &a.weight_component(0)).collect();
    let order = (sig.q() / 2) as u32;

    let mut out = GrassmannElement::zero(&sig);
    // walk multi-indices α with |α| ≤ order, carrying ∂^α h and n^α along
    let mut stack: Vec<(Vec<u32>, usize, Polynomial, GrassmannElement)> =
        vec![(vec![0; k], 0, h.clone(), GrassmannElement::one(&sig))];
    while let Some((alpha, from, deriv, nil_power)) = stack.pop() {
        if nil_power.is_zero() || deriv.is_zero() {
            continue;
        }
        let alpha_fact = alpha
            .iter()
            .fold(BigRational::one(), |acc, &a| acc * BigRational::from_integer(factorial(a)));
        let value = deriv.substitute(&bodies)?;
        out += &nil_power.mul_poly(&value.scale(&(BigRational::one() / alpha_fact)));

        let used: u32 = alpha.iter().sum();
        if used == order {
            continue;
        }
        // extend only at positions ≥ `from` so each multi-index is produced once
        for j in from..k {
            let mut next = alpha.clone();
            next[j] += 1;
            stack.push((next, j, deriv.partial_derivative(j)?, &nil_power * &nils[j]));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat_int, SmoothAtom};
    use crate::grassmann::{AlgebraSignature, Signature};

    fn sig(p: usize, q: usize) -> Signature {
        AlgebraSignature::new(p, q).unwrap()
    }

    #[test]
    fn projection_returns_the_argument() {
        let s = sig(1, 4);
        let x = GrassmannElement::even_generator(&s, 0);
        let t = |j| GrassmannElement::odd_generator(&s, j);
        let f1 = &x + &(&t(0) * &t(1));
        let f2 = &(&t(2) * &t(3)) - &x;
        let args = [f1.clone(), f2.clone()];
        assert_eq!(apply_smooth(&SmoothFn::projection(2, 0), &args).unwrap(), f1);
        assert_eq!(apply_smooth(&SmoothFn::projection(2, 1), &args).unwrap(), f2);
    }

    #[test]
    fn square_keeps_the_fourth_order_term() {
        // (x + θ1θ2 + θ3θ4)^2 = x^2 + 2xθ1θ2 + 2xθ3θ4 + 2θ1θ2θ3θ4
        let s = sig(1, 4);
        let x = GrassmannElement::even_generator(&s, 0);
        let t = |j| GrassmannElement::odd_generator(&s, j);
        let t12 = &t(0) * &t(1);
        let t34 = &t(2) * &t(3);
        let f = &(&x + &t12) + &t34;
        let sq = SmoothFn::Poly(Polynomial::var(1, 0).pow(2));
        let got = apply_smooth(&sq, std::slice::from_ref(&f)).unwrap();
        let expect = &(&(&(&x * &x) + &(&x * &t12).scale(&rat_int(2))) + &(&x * &t34).scale(&rat_int(2)))
            + &(&t12 * &t34).scale(&rat_int(2));
        assert_eq!(got, expect);
        assert_eq!(got, &f * &f);
    }

    #[test]
    fn exp_of_nilpotent() {
        // exp(θ1θ2) = 1 + θ1θ2
        let s = sig(0, 2);
        let t12 = &GrassmannElement::odd_generator(&s, 0) * &GrassmannElement::odd_generator(&s, 1);
        let got = apply_smooth(&SmoothFn::Atom(SmoothAtom::Exp), std::slice::from_ref(&t12)).unwrap();
        assert_eq!(got, &GrassmannElement::one(&s) + &t12);
    }

    #[test]
    fn odd_argument_is_rejected() {
        let s = sig(0, 2);
        let t1 = GrassmannElement::odd_generator(&s, 0);
        let err = apply_smooth(&SmoothFn::projection(1, 0), &[t1]).unwrap_err();
        assert!(matches!(err, KernelError::Parity(_)));
    }

    #[test]
    fn atom_needs_constant_body() {
        let s = sig(1, 2);
        let x = GrassmannElement::even_generator(&s, 0);
        let err = apply_smooth(&SmoothFn::Atom(SmoothAtom::Sin), &[x]).unwrap_err();
        assert!(matches!(err, KernelError::UnsupportedCenter(_)));
    }
}
