use std::fmt;

use num_rational::BigRational;

use super::atoms::SmoothAtom;
use super::polynomial::{Exponent, Polynomial};
use crate::error::{KernelError, Result};

/// A smooth k-ary function: a polynomial, a registered atom, or a composition of those.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SmoothFn {
    /// Polynomial in `nvars` arguments.
    Poly(Polynomial),
    /// A unary analytic atom.
    Atom(SmoothAtom),
    /// `outer(inner_1, .., inner_n)`; every inner function has the same arity.
    Compose { outer: Box<SmoothFn>, inner: Vec<SmoothFn> },
}

impl SmoothFn {
    /// The projection `p_i : ℝᵏ → ℝ` (0-based `i`).
    pub fn projection(arity: usize, i: usize) -> Self {
        SmoothFn::Poly(Polynomial::var(arity, i))
    }

    pub fn compose(outer: SmoothFn, inner: Vec<SmoothFn>) -> Result<Self> {
        if outer.arity() != inner.len() {
            return Err(KernelError::argument(format!(
                "outer function takes {} arguments, {} given",
                outer.arity(),
                inner.len()
            )));
        }
        if let Some(first) = inner.first() {
            if inner.iter().any(|f| f.arity() != first.arity()) {
                return Err(KernelError::argument("inner functions disagree on arity"));
            }
        } else {
            return Err(KernelError::argument("composition needs at least one inner function"));
        }
        Ok(SmoothFn::Compose { outer: Box::new(outer), inner })
    }

    pub fn arity(&self) -> usize {
        match self {
            SmoothFn::Poly(p) => p.nvars(),
            SmoothFn::Atom(_) => 1,
            SmoothFn::Compose { inner, .. } => inner[0].arity(),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        match self {
            SmoothFn::Poly(_) => true,
            SmoothFn::Atom(_) => false,
            SmoothFn::Compose { outer, inner } => outer.is_polynomial() && inner.iter().all(Self::is_polynomial),
        }
    }

    /// Collapses a purely polynomial function into a single polynomial.
    pub fn as_polynomial(&self) -> Option<Polynomial> {
        match self {
            SmoothFn::Poly(p) => Some(p.clone()),
            SmoothFn::Atom(_) => None,
            SmoothFn::Compose { outer, inner } => {
                let outer = outer.as_polynomial()?;
                let inner: Option<Vec<_>> = inner.iter().map(Self::as_polynomial).collect();
                outer.substitute(&inner?).ok()
            }
        }
    }

    /// Exact evaluation at a rational point.
    pub fn eval(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.arity() {
            return Err(KernelError::argument("evaluation point has the wrong dimension"));
        }
        match self {
            SmoothFn::Poly(p) => p.eval(point),
            SmoothFn::Atom(a) => a.value_at(&point[0]),
            SmoothFn::Compose { outer, inner } => {
                let vals = inner.iter().map(|f| f.eval(point)).collect::<Result<Vec<_>>>()?;
                outer.eval(&vals)
            }
        }
    }

    /// Degree-≤`order` Taylor polynomial at `center`, in the shifted variables
    /// `t_i = y_i - center_i`.
    pub fn jet_expand(&self, center: &[BigRational], order: u32) -> Result<Polynomial> {
        let k = self.arity();
        if center.len() != k {
            return Err(KernelError::argument("jet center has the wrong dimension"));
        }
        match self {
            SmoothFn::Poly(p) => {
                let shifted: Vec<Polynomial> = (0..k)
                    .map(|i| &Polynomial::var(k, i) + &Polynomial::constant(k, center[i].clone()))
                    .collect();
                Ok(p.substitute(&shifted)?.truncate(order))
            }
            SmoothFn::Atom(a) => {
                let coeffs = a.taylor_coefficients(&center[0], order)?;
                Ok(Polynomial::from_terms(
                    1,
                    coeffs
                        .into_iter()
                        .enumerate()
                        .map(|(n, c)| (Exponent::from_vec(vec![n as u32]), c)),
                ))
            }
            SmoothFn::Compose { outer, inner } => {
                let mut values = Vec::with_capacity(inner.len());
                let mut increments = Vec::with_capacity(inner.len());
                for f in inner {
                    let jet = f.jet_expand(center, order)?;
                    let v = jet.constant_value_at_origin();
                    increments.push(&jet - &Polynomial::constant(k, v.clone()));
                    values.push(v);
                }
                let outer_jet = outer.jet_expand(&values, order)?;
                // the increments vanish at the origin, so truncating after each product is exact
                Ok(substitute_truncated(&outer_jet, &increments, order))
            }
        }
    }

    /// Text form in the argument names `y1..yk`.
    pub fn to_text(&self) -> String {
        let names: Vec<String> = (1..=self.arity()).map(|i| format!("y{i}")).collect();
        self.to_text_with(&names)
    }

    fn to_text_with(&self, args: &[String]) -> String {
        match self {
            SmoothFn::Poly(p) => p.to_string_with(args),
            SmoothFn::Atom(a) => format!("{}({})", a.name(), args[0]),
            SmoothFn::Compose { outer, inner } => {
                let bare = matches!(**outer, SmoothFn::Atom(_));
                let inner_text: Vec<String> = inner
                    .iter()
                    .map(|f| {
                        let t = f.to_text_with(args);
                        if !bare && needs_parens(&t) {
                            format!("({t})")
                        } else {
                            t
                        }
                    })
                    .collect();
                outer.to_text_with(&inner_text)
            }
        }
    }
}

fn needs_parens(t: &str) -> bool {
    let mut depth = 0i32;
    for (i, ch) in t.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            '+' | '*' | '^' | '/' if depth == 0 => return true,
            '-' if depth == 0 && i > 0 => return true,
            _ => {}
        }
    }
    t.starts_with('-')
}

impl Polynomial {
    fn constant_value_at_origin(&self) -> BigRational {
        self.coefficient(&Exponent::zero(self.nvars()))
    }
}

fn substitute_truncated(outer: &Polynomial, args: &[Polynomial], order: u32) -> Polynomial {
    let k = args.first().map(Polynomial::nvars).unwrap_or(0);
    let mut out = Polynomial::zero(k);
    for (e, c) in outer.terms() {
        let mut term = Polynomial::constant(k, c.clone());
        for (i, &m) in e.as_slice().iter().enumerate() {
            for _ in 0..m {
                term = (&term * &args[i]).truncate(order);
            }
        }
        out += &term;
    }
    out
}

impl fmt::Display for SmoothFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, rat_int};

    fn t() -> Polynomial {
        Polynomial::var(1, 0)
    }

    #[test]
    fn exp_jet_at_zero() {
        let jet = SmoothFn::Atom(SmoothAtom::Exp).jet_expand(&[rat_int(0)], 2).unwrap();
        let expect = &(&Polynomial::one(1) + &t()) + &t().pow(2).scale(&rat(1, 2));
        assert_eq!(jet, expect);
    }

    #[test]
    fn sin_jet_at_zero() {
        let jet = SmoothFn::Atom(SmoothAtom::Sin).jet_expand(&[rat_int(0)], 3).unwrap();
        assert_eq!(jet, &t() - &t().pow(3).scale(&rat(1, 6)));
    }

    #[test]
    fn exp_at_one_is_unsupported() {
        let err = SmoothFn::Atom(SmoothAtom::Exp).jet_expand(&[rat_int(1)], 1).unwrap_err();
        assert!(matches!(err, KernelError::UnsupportedCenter(_)));
    }

    #[test]
    fn composite_jet_matches_series() {
        // exp(sin t) = 1 + t + t^2/2 + 0 t^3 - t^4/8 + ...
        let f = SmoothFn::compose(SmoothFn::Atom(SmoothAtom::Exp), vec![SmoothFn::Atom(SmoothAtom::Sin)]).unwrap();
        let jet = f.jet_expand(&[rat_int(0)], 4).unwrap();
        let coeffs: Vec<_> = (0..=4).map(|n| jet.coefficient(&Exponent::from_vec(vec![n]))).collect();
        assert_eq!(coeffs, vec![rat_int(1), rat_int(1), rat(1, 2), rat_int(0), rat(-1, 8)]);
    }

    #[test]
    fn polynomial_jet_is_a_shift() {
        // t^2 at 3: 9 + 6s + s^2
        let f = SmoothFn::Poly(t().pow(2));
        let jet = f.jet_expand(&[rat_int(3)], 5).unwrap();
        let expect = &(&Polynomial::constant(1, rat_int(9)) + &t().scale(&rat_int(6))) + &t().pow(2);
        assert_eq!(jet, expect);
    }

    #[test]
    fn composition_arity_checks() {
        let outer = SmoothFn::Poly(Polynomial::var(2, 0));
        assert!(SmoothFn::compose(outer, vec![SmoothFn::Atom(SmoothAtom::Exp)]).is_err());
    }

    #[test]
    fn text_form() {
        let f = SmoothFn::compose(
            SmoothFn::Atom(SmoothAtom::Exp),
            vec![SmoothFn::Poly(&t().pow(2) + &Polynomial::one(1))],
        )
        .unwrap();
        assert_eq!(f.to_text(), "exp(y1^2 + 1)");
        let g = SmoothFn::compose(SmoothFn::Poly(t().pow(2)), vec![SmoothFn::Poly(&t() + &Polynomial::one(1))]).unwrap();
        assert_eq!(g.to_text(), "(y1 + 1)^2");
    }
}
