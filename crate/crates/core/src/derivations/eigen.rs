use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::derivation::SuperDerivation;
use crate::error::{KernelError, Result};
use crate::grassmann::{GrassmannElement, Monomial, Parity, Signature};
use crate::linalg::{Echelon, Insertion, SparseRow};

/// Result of [`eigen_decompose`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum EigenDecomposition {
    /// Nonzero components `c_k` with `Σ c_k = a` and `E(c_k) = k c_k`.
    Components(BTreeMap<u32, GrassmannElement>),
    /// `a` is not a sum of eigenvectors with eigenvalues in `0..=q`; `residual` is the
    /// part left over (or the first component that fails the eigen-equation).
    NonDecomposable { residual: GrassmannElement },
}

/// Splits `a` into eigenvectors of the even derivation `E` with eigenvalues `0..=q`,
/// using the Lagrange projectors `Π_{j≠k} (E - j)/(k - j)`.
pub fn eigen_decompose(a: &GrassmannElement, e: &SuperDerivation) -> Result<EigenDecomposition> {
    if e.parity() != Parity::Even {
        return Err(KernelError::argument("eigen decomposition needs an even derivation"));
    }
    let q = e.signature().q() as u32;
    let mut comps = BTreeMap::new();
    let mut sum = GrassmannElement::zero(e.signature());
    for k in 0..=q {
        let mut c = a.clone();
        for j in (0..=q).filter(|&j| j != k) {
            let shifted = &e.apply(&c)? - &c.scale(&int(j as i64));
            c = shifted.scale(&(BigRational::from_integer(BigInt::from(1)) / int(k as i64 - j as i64)));
        }
        if c.is_zero() {
            continue;
        }
        if e.apply(&c)? != c.scale(&int(k as i64)) {
            return Ok(EigenDecomposition::NonDecomposable { residual: c });
        }
        sum += &c;
        comps.insert(k, c);
    }
    if &sum != a {
        return Ok(EigenDecomposition::NonDecomposable { residual: a - &sum });
    }
    Ok(EigenDecomposition::Components(comps))
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Dimensions behind `J^k = Ker(E - k) ⊕ J^{k+1}` for one weight level, all restricted to
/// total degree ≤ D.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiltrationLevel {
    pub k: u32,
    pub dim_jk: usize,
    pub dim_kernel: usize,
    pub dim_jk1: usize,
    /// Dimension of `Ker(E - k) ∩ J^{k+1}`.
    pub dim_intersection: usize,
}

impl FiltrationLevel {
    pub fn splits(&self) -> bool {
        self.dim_intersection == 0 && self.dim_jk == self.dim_kernel + self.dim_jk1
    }
}

/// For each `0 ≤ k ≤ q`, computes the kernel of `E - k` on the truncated span of
/// `J^k` by row reduction and compares dimensions with `J^{k+1}`. `E` must map total
/// degree ≤ D into itself (true for the Euler field).
pub fn filtration_splitting(e: &SuperDerivation, max_degree: u32) -> Result<Vec<FiltrationLevel>> {
    let sig = e.signature();
    let monos = Monomial::all_up_to(sig, max_degree);
    let column: BTreeMap<&Monomial, usize> = monos.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let to_row = |x: &GrassmannElement| -> Result<SparseRow> {
        let mut row = SparseRow::new();
        for (m, c) in x.monomials() {
            let col = column.get(&m).ok_or(KernelError::Truncation {
                degree: m.total_degree(),
                bound: max_degree,
            })?;
            row.insert(*col, c.clone());
        }
        Ok(row)
    };
    let mut levels = Vec::new();
    for k in 0..=sig.q() as u32 {
        let jk: Vec<&Monomial> = monos.iter().filter(|m| m.weight() >= k).collect();
        let jk1: Vec<&Monomial> = monos.iter().filter(|m| m.weight() > k).collect();
        // kernel vectors of (E - k) restricted to span(jk)
        let mut image = Echelon::tracking();
        let mut kernel = Vec::new();
        for m in &jk {
            let x = monomial(sig, m);
            let v = &e.apply(&x)? - &x.scale(&int(k as i64));
            if let Insertion::Dependent(combo) = image.insert(to_row(&v)?) {
                let mut kv = SparseRow::new();
                for (idx, c) in combo {
                    kv.insert(column[jk[idx]], c);
                }
                kernel.push(kv);
            }
        }
        let mut joint = Echelon::new();
        for kv in &kernel {
            joint.insert(kv.clone());
        }
        for m in &jk1 {
            joint.insert(to_row(&monomial(sig, m))?);
        }
        let dim_kernel = kernel.len();
        levels.push(FiltrationLevel {
            k,
            dim_jk: jk.len(),
            dim_kernel,
            dim_jk1: jk1.len(),
            dim_intersection: dim_kernel + jk1.len() - joint.rank(),
        });
    }
    Ok(levels)
}

fn monomial(sig: &Signature, m: &Monomial) -> GrassmannElement {
    GrassmannElement::monomial(sig, m, int(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::rat_int;
    use crate::grassmann::AlgebraSignature;

    #[test]
    fn weight_components_are_eigen_components() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let x = GrassmannElement::even_generator(&s, 0);
        let t1 = GrassmannElement::odd_generator(&s, 0);
        let t12 = &t1 * &GrassmannElement::odd_generator(&s, 1);
        let a = &(&x + &(&x * &t1)) + &t12.scale(&rat_int(3));
        let EigenDecomposition::Components(c) = eigen_decompose(&a, &SuperDerivation::euler_field(&s)).unwrap() else {
            panic!("weight components are eigenvectors");
        };
        assert_eq!(c.len(), 3);
        assert_eq!(c[&0], x);
        assert_eq!(c[&1], &x * &t1);
        assert_eq!(c[&2], t12.scale(&rat_int(3)));
    }

    #[test]
    fn top_weight_monomial() {
        let s = AlgebraSignature::new(0, 3).unwrap();
        let t = |j| GrassmannElement::odd_generator(&s, j);
        let a = &(&t(0) * &t(1)) * &t(2);
        let EigenDecomposition::Components(c) = eigen_decompose(&a, &SuperDerivation::euler_field(&s)).unwrap() else {
            panic!()
        };
        assert_eq!(c.into_iter().collect::<Vec<_>>(), vec![(3, a)]);
    }

    #[test]
    fn non_diagonalizable_derivation_is_reported() {
        // E = θ¹ ∂/∂θ² acts nilpotently: θ² has no eigen decomposition with E θ² = θ¹
        let s = AlgebraSignature::new(0, 2).unwrap();
        let e = SuperDerivation::new(
            &s,
            vec![],
            vec![GrassmannElement::zero(&s), GrassmannElement::odd_generator(&s, 0)],
        )
        .unwrap();
        let out = eigen_decompose(&GrassmannElement::odd_generator(&s, 1), &e).unwrap();
        assert!(matches!(out, EigenDecomposition::NonDecomposable { .. }));
    }

    #[test]
    fn euler_filtration_splits() {
        for q in 0..=3 {
            let s = AlgebraSignature::new(1, q).unwrap();
            for level in filtration_splitting(&SuperDerivation::euler_field(&s), 4).unwrap() {
                assert!(level.splits(), "{level:?}");
            }
        }
    }

    #[test]
    fn zero_derivation_does_not_split_the_filtration() {
        let s = AlgebraSignature::new(0, 2).unwrap();
        let levels = filtration_splitting(&SuperDerivation::zero(&s, Parity::Even), 3).unwrap();
        assert!(!levels[1].splits());
    }
}
