use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::derivation::SuperDerivation;
use crate::error::Result;
use crate::grassmann::random::random_element;
use crate::grassmann::{GrassmannElement, Monomial, Parity, Signature};

/// A homogeneous linear map on the free algebra, the input of [`leibniz_check`].
pub trait SuperLinearMap {
    fn signature(&self) -> &Signature;
    fn parity(&self) -> Parity;
    fn apply(&self, a: &GrassmannElement) -> Result<GrassmannElement>;
}

impl SuperLinearMap for SuperDerivation {
    fn signature(&self) -> &Signature {
        SuperDerivation::signature(self)
    }

    fn parity(&self) -> Parity {
        SuperDerivation::parity(self)
    }

    fn apply(&self, a: &GrassmannElement) -> Result<GrassmannElement> {
        SuperDerivation::apply(self, a)
    }
}

/// A linear map given monomial by monomial: explicit images for some monomials and a
/// derivation for the rest. Not a derivation in general.
#[derive(Clone, Debug)]
pub struct RawLinearMap {
    base: SuperDerivation,
    overrides: BTreeMap<Monomial, GrassmannElement>,
}

impl RawLinearMap {
    pub fn new(base: SuperDerivation) -> Self {
        RawLinearMap { base, overrides: BTreeMap::new() }
    }

    /// Sends the monomial `m` (coefficient 1) to `image`.
    pub fn with_image(mut self, m: Monomial, image: GrassmannElement) -> Self {
        self.overrides.insert(m, image);
        self
    }
}

impl SuperLinearMap for RawLinearMap {
    fn signature(&self) -> &Signature {
        self.base.signature()
    }

    fn parity(&self) -> Parity {
        self.base.parity()
    }

    fn apply(&self, a: &GrassmannElement) -> Result<GrassmannElement> {
        let sig = self.base.signature();
        let mut out = GrassmannElement::zero(sig);
        for (m, c) in a.monomials() {
            let image = match self.overrides.get(&m) {
                Some(img) => img.clone(),
                None => self.base.apply(&GrassmannElement::monomial(sig, &m, num_traits::One::one()))?,
            };
            out += &image.scale(c);
        }
        Ok(out)
    }
}

/// A pair violating `D(rs) = D(r)s + (-1)^{|D||r|} r D(s)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LeibnizViolation {
    pub r: GrassmannElement,
    pub s: GrassmannElement,
    pub lhs: GrassmannElement,
    pub rhs: GrassmannElement,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct LeibnizReport {
    pub exhaustive_pairs: usize,
    pub random_pairs: usize,
    pub violation: Option<LeibnizViolation>,
}

impl LeibnizReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Total degree bound on `deg r + deg s` for the exhaustive monomial sweep.
const EXHAUSTIVE_DEGREE: u32 = 3;

/// Checks the graded Leibniz rule: first on every pair of monomials of small combined
/// degree (in increasing order, so the first witness is a smallest one), then on
/// `trials` seeded random homogeneous pairs.
pub fn leibniz_check<M: SuperLinearMap + ?Sized>(map: &M, trials: usize, seed: u64) -> Result<LeibnizReport> {
    let sig = map.signature().clone();
    let mut report = LeibnizReport { exhaustive_pairs: 0, random_pairs: 0, violation: None };

    let mut monos = Monomial::all_up_to(&sig, EXHAUSTIVE_DEGREE);
    monos.sort_by(|a, b| (a.total_degree(), a.mask, &a.exp).cmp(&(b.total_degree(), b.mask, &b.exp)));
    let mut pairs: Vec<(&Monomial, &Monomial)> = Vec::new();
    for r in &monos {
        for s in &monos {
            if r.total_degree() + s.total_degree() <= EXHAUSTIVE_DEGREE {
                pairs.push((r, s));
            }
        }
    }
    pairs.sort_by_key(|(r, s)| r.total_degree() + s.total_degree());
    let one = num_traits::One::one;
    for (r, s) in pairs {
        report.exhaustive_pairs += 1;
        let r = GrassmannElement::monomial(&sig, r, one());
        let s = GrassmannElement::monomial(&sig, s, one());
        if let Some(v) = check_pair(map, &r, &s)? {
            report.violation = Some(v);
            return Ok(report);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for n in 0..trials {
        let pr = if n % 2 == 0 { Parity::Even } else { Parity::Odd };
        let ps = if n % 4 < 2 { Parity::Even } else { Parity::Odd };
        let r = random_element(&mut rng, &sig, Some(pr), 2, 3);
        let s = random_element(&mut rng, &sig, Some(ps), 2, 3);
        report.random_pairs += 1;
        if let Some(v) = check_pair(map, &r, &s)? {
            report.violation = Some(v);
            return Ok(report);
        }
    }
    Ok(report)
}

fn check_pair<M: SuperLinearMap + ?Sized>(
    map: &M,
    r: &GrassmannElement,
    s: &GrassmannElement,
) -> Result<Option<LeibnizViolation>> {
    let lhs = map.apply(&(r * s))?;
    let mut rhs = &map.apply(r)? * s;
    let r_parity = r.parity().unwrap_or(Parity::Even);
    let second = r * &map.apply(s)?;
    if map.parity().sign_with(r_parity) < 0 {
        rhs -= &second;
    } else {
        rhs += &second;
    }
    Ok((lhs != rhs).then(|| LeibnizViolation { r: r.clone(), s: s.clone(), lhs, rhs }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::Exponent;
    use crate::grassmann::AlgebraSignature;

    #[test]
    fn euler_field_passes() {
        let s = AlgebraSignature::new(1, 3).unwrap();
        let report = leibniz_check(&SuperDerivation::euler_field(&s), 500, 7).unwrap();
        assert!(report.passed());
        assert_eq!(report.random_pairs, 500);
    }

    #[test]
    fn zero_and_odd_derivations_pass() {
        let s = AlgebraSignature::new(2, 3).unwrap();
        assert!(leibniz_check(&SuperDerivation::zero(&s, Parity::Even), 100, 1).unwrap().passed());
        let t = |j| GrassmannElement::odd_generator(&s, j);
        let odd = SuperDerivation::new(
            &s,
            vec![t(0), &t(1) * &(&t(0) * &t(2))],
            vec![GrassmannElement::even_generator(&s, 1), &t(0) * &t(1), GrassmannElement::zero(&s)],
        )
        .unwrap();
        assert_eq!(odd.parity(), Parity::Odd);
        assert!(leibniz_check(&odd, 200, 3).unwrap().passed());
    }

    #[test]
    fn corrupted_map_is_caught_with_smallest_witness() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let t12 = Monomial::new(Exponent::zero(1), 0b11);
        let map = RawLinearMap::new(SuperDerivation::euler_field(&s)).with_image(t12, GrassmannElement::zero(&s));
        let report = leibniz_check(&map, 10, 0).unwrap();
        let v = report.violation.expect("corruption must be detected");
        assert_eq!(v.r, GrassmannElement::odd_generator(&s, 0));
        assert_eq!(v.s, GrassmannElement::odd_generator(&s, 1));
    }
}
