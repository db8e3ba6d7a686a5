use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::rational::{factorial, format_rational};
use crate::error::{KernelError, Result};

/// The closed registry of analytic atoms.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum SmoothAtom {
    Exp,
    Sin,
    Cos,
    Log,
}

/// A closed-form n-th derivative of an atom: either `coeff * atom(t)` or `coeff * t^-power`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum AtomTerm {
    Scaled { coeff: BigRational, atom: SmoothAtom },
    InversePower { coeff: BigRational, power: u32 },
}

impl SmoothAtom {
    pub const ALL: [SmoothAtom; 4] = [SmoothAtom::Exp, SmoothAtom::Sin, SmoothAtom::Cos, SmoothAtom::Log];

    pub fn name(self) -> &'static str {
        match self {
            SmoothAtom::Exp => "exp",
            SmoothAtom::Sin => "sin",
            SmoothAtom::Cos => "cos",
            SmoothAtom::Log => "log",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.name() == name)
    }

    /// Domain guard: `log` needs a positive argument, the others are entire.
    pub fn check_domain(self, at: &BigRational) -> Result<()> {
        if self == SmoothAtom::Log && !at.is_positive() {
            return Err(KernelError::Domain(format!(
                "log is undefined at {}",
                format_rational(at)
            )));
        }
        Ok(())
    }

    /// n-th derivative as a closed rule.
    pub fn derivative(self, n: u32) -> AtomTerm {
        let one = BigRational::one();
        let scaled = |sign: i64, atom| AtomTerm::Scaled {
            coeff: BigRational::from_integer(BigInt::from(sign)),
            atom,
        };
        match self {
            SmoothAtom::Exp => AtomTerm::Scaled { coeff: one, atom: SmoothAtom::Exp },
            SmoothAtom::Sin => match n % 4 {
                0 => scaled(1, SmoothAtom::Sin),
                1 => scaled(1, SmoothAtom::Cos),
                2 => scaled(-1, SmoothAtom::Sin),
                _ => scaled(-1, SmoothAtom::Cos),
            },
            SmoothAtom::Cos => match n % 4 {
                0 => scaled(1, SmoothAtom::Cos),
                1 => scaled(-1, SmoothAtom::Sin),
                2 => scaled(-1, SmoothAtom::Cos),
                _ => scaled(1, SmoothAtom::Sin),
            },
            SmoothAtom::Log if n == 0 => scaled(1, SmoothAtom::Log),
            SmoothAtom::Log => {
                // d^n/dt^n log t = (-1)^(n-1) (n-1)! t^-n
                let sign = if n % 2 == 1 { 1 } else { -1 };
                AtomTerm::InversePower {
                    coeff: BigRational::from_integer(BigInt::from(sign) * factorial(n - 1)),
                    power: n,
                }
            }
        }
    }

    /// The exact value at a rational point, when it is rational.
    ///
    /// By Lindemann–Weierstrass and Niven, `exp`, `sin`, `cos` and `log` take rational
    /// values at rational points only at `exp(0)`, `sin(0)`, `cos(0)` and `log(1)`.
    pub fn value_at(self, at: &BigRational) -> Result<BigRational> {
        self.check_domain(at)?;
        let value = match self {
            SmoothAtom::Exp if at.is_zero() => Some(BigRational::one()),
            SmoothAtom::Sin if at.is_zero() => Some(BigRational::zero()),
            SmoothAtom::Cos if at.is_zero() => Some(BigRational::one()),
            SmoothAtom::Log if at.is_one() => Some(BigRational::zero()),
            _ => None,
        };
        value.ok_or_else(|| {
            KernelError::UnsupportedCenter(format!(
                "{}({}) is irrational",
                self.name(),
                format_rational(at)
            ))
        })
    }

    /// Taylor coefficients `f^(n)(c) / n!` for `n = 0..=order`.
    pub fn taylor_coefficients(self, center: &BigRational, order: u32) -> Result<Vec<BigRational>> {
        self.check_domain(center)?;
        (0..=order)
            .map(|n| {
                let v = self.derivative(n).eval(center)?;
                Ok(v / BigRational::from_integer(factorial(n)))
            })
            .collect()
    }
}

impl AtomTerm {
    pub fn eval(&self, at: &BigRational) -> Result<BigRational> {
        match self {
            AtomTerm::Scaled { coeff, atom } => Ok(coeff * atom.value_at(at)?),
            AtomTerm::InversePower { coeff, power } => {
                if at.is_zero() {
                    return Err(KernelError::Domain("t^-n is undefined at 0".into()));
                }
                let mut denom = BigRational::one();
                for _ in 0..*power {
                    denom *= at;
                }
                Ok(coeff / denom)
            }
        }
    }
}

impl fmt::Display for SmoothAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, rat_int};

    #[test]
    fn exp_maclaurin() {
        let c = SmoothAtom::Exp.taylor_coefficients(&rat_int(0), 2).unwrap();
        assert_eq!(c, vec![rat_int(1), rat_int(1), rat(1, 2)]);
    }

    #[test]
    fn sin_maclaurin() {
        let c = SmoothAtom::Sin.taylor_coefficients(&rat_int(0), 3).unwrap();
        assert_eq!(c, vec![rat_int(0), rat_int(1), rat_int(0), rat(-1, 6)]);
    }

    #[test]
    fn cos_maclaurin() {
        let c = SmoothAtom::Cos.taylor_coefficients(&rat_int(0), 4).unwrap();
        assert_eq!(c, vec![rat_int(1), rat_int(0), rat(-1, 2), rat_int(0), rat(1, 24)]);
    }

    #[test]
    fn log_at_one() {
        // log(1 + t) = t - t^2/2 + t^3/3 - ...
        let c = SmoothAtom::Log.taylor_coefficients(&rat_int(1), 3).unwrap();
        assert_eq!(c, vec![rat_int(0), rat_int(1), rat(-1, 2), rat(1, 3)]);
    }

    #[test]
    fn irrational_center_is_rejected() {
        let err = SmoothAtom::Exp.taylor_coefficients(&rat_int(1), 1).unwrap_err();
        assert!(matches!(err, KernelError::UnsupportedCenter(_)));
        let err = SmoothAtom::Log.taylor_coefficients(&rat_int(2), 0).unwrap_err();
        assert!(matches!(err, KernelError::UnsupportedCenter(_)));
    }

    #[test]
    fn log_guard() {
        let err = SmoothAtom::Log.taylor_coefficients(&rat_int(-1), 1).unwrap_err();
        assert!(matches!(err, KernelError::Domain(_)));
    }

    #[test]
    fn derivative_rules_cycle() {
        for atom in [SmoothAtom::Sin, SmoothAtom::Cos, SmoothAtom::Exp] {
            assert_eq!(atom.derivative(4), atom.derivative(0));
        }
        assert_eq!(
            SmoothAtom::Log.derivative(3),
            AtomTerm::InversePower { coeff: rat_int(2), power: 3 }
        );
    }
}
