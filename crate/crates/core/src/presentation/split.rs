use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::quotient::Presentation;
use crate::coeff::Exponent;
use crate::derivations::{adapted_check, combine, AdaptedReport, SuperDerivation};
use crate::error::{KernelError, Result};
use crate::grassmann::{GrassmannElement, Monomial, Parity, Signature};
use crate::linalg::{self, SparseRow};

/// An even derivation adapted to the J-adic filtration of the truncated quotient, with
/// the re-verification that was run on it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SplitCertificate {
    pub derivation: SuperDerivation,
    pub d: u32,
    pub big_d: u32,
    pub adapted: AdaptedReport,
    /// For each relation r: whether `truncate_D(E(r))` lies in the truncated ideal.
    pub relations_preserved: Vec<bool>,
    pub unknowns: usize,
    pub equations: usize,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SplitVerdict {
    Certificate(Box<SplitCertificate>),
    /// No adapted even derivation with coefficient degree ≤ d exists modulo degree > D.
    NoCertificate { d: u32, big_d: u32, unknowns: usize, equations: usize },
}

impl SplitVerdict {
    pub fn is_certificate(&self) -> bool {
        matches!(self, SplitVerdict::Certificate(_))
    }
}

/// The candidate basis: `x^e θ^I ∂/∂x_i` (|I| even) and `x^e θ^I ∂/∂θ^j` (|I| odd),
/// `deg e ≤ d`.
fn derivation_basis(sig: &Signature, d: u32) -> Vec<SuperDerivation> {
    let exps = Exponent::all_up_to(sig.p(), d);
    let mut out = Vec::new();
    let slots = sig.p() + sig.q();
    for slot in 0..slots {
        let want = if slot < sig.p() { Parity::Even } else { Parity::Odd };
        for mask in 0..=sig.full_mask() {
            if Parity::of_weight(mask.count_ones()) != want {
                continue;
            }
            for e in &exps {
                let c = GrassmannElement::monomial(sig, &Monomial::new(e.clone(), mask), BigRational::one());
                let mut even = vec![GrassmannElement::zero(sig); sig.p()];
                let mut odd = vec![GrassmannElement::zero(sig); sig.q()];
                if slot < sig.p() {
                    even[slot] = c;
                } else {
                    odd[slot - sig.p()] = c;
                }
                out.push(SuperDerivation::with_parity(sig, Parity::Even, even, odd).expect("parity chosen to match"));
            }
        }
    }
    out
}

/// Collects linear equations `Σ_u x_u v_u = rhs` coordinate by coordinate.
#[derive(Default)]
struct System {
    equations: Vec<(SparseRow, BigRational)>,
}

impl System {
    fn add(&mut self, columns: &[SparseRow], rhs: &SparseRow) {
        let mut by_coord: BTreeMap<usize, SparseRow> = BTreeMap::new();
        for (u, v) in columns.iter().enumerate() {
            for (&c, x) in v {
                by_coord.entry(c).or_default().insert(u, x.clone());
            }
        }
        for c in rhs.keys() {
            by_coord.entry(*c).or_default();
        }
        for (c, lhs) in by_coord {
            let b = rhs.get(&c).cloned().unwrap_or_else(BigRational::zero);
            self.equations.push((lhs, b));
        }
    }
}

/// Searches for an even derivation `E` with polynomial coefficients of degree ≤ d that
/// descends to the quotient (E maps every relation into the ideal) and is adapted to the
/// J-adic filtration, all modulo total degree > D. Feasibility is an exact linear solve.
pub fn split_search(pres: &Presentation, d: u32, big_d: u32) -> Result<SplitVerdict> {
    if d > big_d {
        return Err(KernelError::argument(format!("coefficient degree d={d} exceeds truncation D={big_d}")));
    }
    let pres = pres.with_bounds(d, big_d)?;
    let sig = pres.signature().clone();
    let basis = derivation_basis(&sig, d);
    let ideal = pres.ideal_span();
    let index = ideal.index().clone();
    let mut system = System::default();

    for r in pres.relations() {
        let columns: Vec<SparseRow> = basis
            .iter()
            .map(|u| Ok(ideal.reduce_row(&index.to_row_truncated(&u.apply(r)?))))
            .collect::<Result<_>>()?;
        system.add(&columns, &SparseRow::new());
    }

    for k in 0..=sig.q() as u32 {
        let upper = pres.filtration_span(k + 1);
        let kk = BigRational::from_integer(BigInt::from(k));
        for (col, m) in index.monomials().iter().enumerate() {
            if m.weight() < k {
                continue;
            }
            let x = index.monomial_element(col);
            let columns: Vec<SparseRow> = basis
                .iter()
                .map(|u| Ok(upper.reduce_row(&index.to_row_truncated(&u.apply(&x)?))))
                .collect::<Result<_>>()?;
            let mut rhs = upper.reduce_row(&index.to_row_truncated(&x));
            for v in rhs.values_mut() {
                *v *= &kk;
            }
            system.add(&columns, &rhs);
        }
    }

    let unknowns = basis.len();
    let equations = system.equations.len();
    let Some(solution) = linalg::solve(&system.equations, unknowns) else {
        return Ok(SplitVerdict::NoCertificate { d, big_d, unknowns, equations });
    };
    let parts: Vec<(BigRational, &SuperDerivation)> = solution
        .into_iter()
        .zip(&basis)
        .filter(|(c, _)| !c.is_zero())
        .collect();
    let derivation = combine(&sig, Parity::Even, &parts);
    let adapted = adapted_check(&derivation, Some(&pres), big_d)?;
    let relations_preserved = pres
        .relations()
        .iter()
        .map(|r| Ok(ideal.contains_truncated(&derivation.apply(r)?)))
        .collect::<Result<Vec<_>>>()?;
    if !adapted.passed() || relations_preserved.iter().any(|ok| !ok) {
        return Err(KernelError::Precondition(
            "solver returned a derivation that fails re-verification".into(),
        ));
    }
    Ok(SplitVerdict::Certificate(Box::new(SplitCertificate {
        derivation,
        d,
        big_d,
        adapted,
        relations_preserved,
        unknowns,
        equations,
    })))
}
