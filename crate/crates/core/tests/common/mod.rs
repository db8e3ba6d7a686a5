//! Reference implementations used to cross-check the kernel in integration tests.
//!
//! The oracle algebra stores a monomial as (even exponents, odd indices in increasing
//! order) and multiplies by concatenating odd index lists and bubble-sorting them,
//! flipping the sign on every adjacent swap.

#![allow(dead_code)]

use std::collections::BTreeMap;

use grassmann_kernel::grassmann::{GrassmannElement, Signature};
use grassmann_kernel::{BigRational, Polynomial};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type OMono = (Vec<u32>, Vec<usize>);

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Oracle {
    pub terms: BTreeMap<OMono, BigRational>,
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn r(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

impl Oracle {
    pub fn from_element(e: &GrassmannElement) -> Oracle {
        let q = e.signature().q();
        let mut out = Oracle::default();
        for (m, c) in e.monomials() {
            let odd: Vec<usize> = (0..q).filter(|j| m.mask & (1 << j) != 0).collect();
            out.add((m.exp.as_slice().to_vec(), odd), c.clone());
        }
        out
    }

    pub fn add(&mut self, key: OMono, c: BigRational) {
        let entry = self.terms.entry(key.clone()).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn plus(&self, other: &Oracle) -> Oracle {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add(k.clone(), c.clone());
        }
        out
    }

    pub fn scaled(&self, s: &BigRational) -> Oracle {
        let mut out = Oracle::default();
        for (k, c) in &self.terms {
            out.add(k.clone(), c * s);
        }
        out
    }

    pub fn times(&self, other: &Oracle) -> Oracle {
        let mut out = Oracle::default();
        for ((ea, oa), ca) in &self.terms {
            for ((eb, ob), cb) in &other.terms {
                let mut idx: Vec<usize> = oa.iter().chain(ob).copied().collect();
                let mut sign = 1i64;
                for i in 0..idx.len() {
                    for j in 0..idx.len() - 1 - i {
                        if idx[j] > idx[j + 1] {
                            idx.swap(j, j + 1);
                            sign = -sign;
                        }
                    }
                }
                if idx.windows(2).any(|w| w[0] == w[1]) {
                    continue;
                }
                let exp: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add((exp, idx), ca * cb * BigRational::from_integer(sign.into()));
            }
        }
        out
    }

    pub fn one(p: usize) -> Oracle {
        let mut o = Oracle::default();
        o.add((vec![0; p], vec![]), BigRational::one());
        o
    }

    pub fn pow(&self, p: usize, n: u32) -> Oracle {
        let mut acc = Oracle::one(p);
        for _ in 0..n {
            acc = acc.times(self);
        }
        acc
    }

    /// Evaluates a polynomial at oracle elements by Horner-free monomial expansion.
    pub fn eval_poly(h: &Polynomial, args: &[Oracle], p: usize) -> Oracle {
        let mut out = Oracle::default();
        for (e, c) in h.terms() {
            let mut term = Oracle::one(p);
            for (i, &k) in e.as_slice().iter().enumerate() {
                term = term.times(&args[i].pow(p, k));
            }
            out = out.plus(&term.scaled(c));
        }
        out
    }
}

/// Number of even monomials in `p` variables of degree ≤ `d`.
pub fn count_even_monomials(p: usize, d: i64) -> usize {
    if d < 0 {
        return 0;
    }
    binomial(d as usize + p, p)
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r = 1usize;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// `θ^{j1}⋯θ^{jk}` for 1-based indices.
pub fn thetas(sig: &Signature, idx: &[usize]) -> GrassmannElement {
    idx.iter()
        .fold(GrassmannElement::one(sig), |acc, &j| &acc * &GrassmannElement::odd_generator(sig, j - 1))
}

/// Applies the algebra map sending generators to the given images (as oracles over a
/// target with `p_target` even generators) to `e`, by direct substitution.
pub fn oracle_apply(even: &[Oracle], odd: &[Oracle], e: &GrassmannElement, p_target: usize) -> Oracle {
    let mut out = Oracle::default();
    for ((exp, idx), c) in &Oracle::from_element(e).terms {
        let mut term = Oracle::one(p_target);
        for (i, &k) in exp.iter().enumerate() {
            term = term.times(&even[i].pow(p_target, k));
        }
        for &j in idx {
            term = term.times(&odd[j]);
        }
        out = out.plus(&term.scaled(c));
    }
    out
}

pub fn morphism_oracles(m: &grassmann_kernel::Morphism) -> (Vec<Oracle>, Vec<Oracle>) {
    (
        m.even_images().iter().map(Oracle::from_element).collect(),
        m.odd_images().iter().map(Oracle::from_element).collect(),
    )
}

pub mod docgen {
    use grassmann_kernel::coeff::{Polynomial, SmoothAtom, SmoothFn};
    use grassmann_kernel::dsl::{ChartDecl, Command, CoverDecl, Item, Model, TransitionDecl, EULER};
    use grassmann_kernel::grassmann::random::{random_element, random_polynomial, small_rational};
    use grassmann_kernel::grassmann::{AlgebraSignature, GrassmannElement, Parity, Signature};
    use grassmann_kernel::SuperDerivation;
    use num_traits::Signed;
    use rand::Rng;

    fn flip(p: Parity) -> Parity {
        if p == Parity::Even {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    fn relation<R: Rng>(rng: &mut R, sig: &Signature) -> Option<GrassmannElement> {
        let parity = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let r = random_element(rng, sig, Some(parity), 1, 2);
        (!r.is_zero()).then_some(r)
    }

    fn bounds<R: Rng>(rng: &mut R, rels: &[GrassmannElement]) -> (Option<u32>, Option<u32>) {
        let max = rels.iter().filter_map(GrassmannElement::total_degree).max().unwrap_or(0);
        let d = rng.gen_bool(0.5).then(|| rng.gen_range(1..=3));
        let big_d = rng.gen_bool(0.5).then(|| max.max(3) + rng.gen_range(0..2));
        (d, big_d)
    }

    fn derivation<R: Rng>(rng: &mut R, sig: &Signature) -> Option<SuperDerivation> {
        let parity = if rng.gen_bool(0.5) { Parity::Even } else { Parity::Odd };
        let even = (0..sig.p()).map(|_| random_element(rng, sig, Some(parity), 1, 1)).collect::<Vec<_>>();
        let odd = (0..sig.q()).map(|_| random_element(rng, sig, Some(flip(parity)), 1, 1)).collect::<Vec<_>>();
        if even.iter().chain(&odd).all(GrassmannElement::is_zero) {
            return None;
        }
        SuperDerivation::new(sig, even, odd).ok()
    }

    fn smooth_fn<R: Rng>(rng: &mut R, k: usize) -> SmoothFn {
        if rng.gen_bool(0.5) {
            return SmoothFn::Poly(random_polynomial(rng, k, 3, 3));
        }
        let mut outer = random_polynomial(rng, k + 1, 2, 2);
        if !outer.terms().any(|(e, _)| e.get(k) > 0) {
            outer = &outer + &Polynomial::var(k + 1, k);
        }
        let atom = SmoothAtom::ALL[rng.gen_range(0..SmoothAtom::ALL.len())];
        let call = SmoothFn::compose(SmoothFn::Atom(atom), vec![SmoothFn::Poly(random_polynomial(rng, k, 2, 2))]).unwrap();
        let mut inner: Vec<SmoothFn> = (0..k).map(|i| SmoothFn::projection(k, i)).collect();
        inner.push(call);
        SmoothFn::compose(SmoothFn::Poly(outer), inner).unwrap()
    }

    fn cover<R: Rng>(rng: &mut R) -> CoverDecl {
        let (p, q) = (1, rng.gen_range(0..=2));
        let sig = AlgebraSignature::new(p, q).unwrap();
        let n = rng.gen_range(1..=3);
        let names = ["A", "B", "C"];
        let mut decl = CoverDecl::default();
        for name in &names[..n] {
            let relations: Vec<GrassmannElement> =
                if rng.gen_bool(0.3) { relation(rng, &sig).into_iter().collect() } else { Vec::new() };
            let (d, big_d) = if rng.gen_bool(0.3) { bounds(rng, &relations) } else { (None, None) };
            decl.charts.push(ChartDecl { name: name.to_string(), sig: sig.clone(), relations, d, big_d });
        }
        if n >= 2 {
            let members: Vec<String> = names[..n].iter().map(|s| s.to_string()).collect();
            if n == 3 && rng.gen_bool(0.5) {
                decl.overlaps.push(members.clone());
            } else {
                decl.overlaps.push(members[..2].to_vec());
            }
            for (a, b) in [(0usize, 1usize), (1, 2)] {
                if b >= n || (b == 2 && decl.overlaps[0].len() < 3) || rng.gen_bool(0.3) {
                    continue;
                }
                let mut images = Vec::new();
                let x = GrassmannElement::even_generator(&sig, 0);
                let image = if q == 2 && rng.gen_bool(0.7) {
                    let tt = &GrassmannElement::odd_generator(&sig, 0) * &GrassmannElement::odd_generator(&sig, 1);
                    &x + &tt.scale(&small_rational(rng))
                } else {
                    x
                };
                images.push(("x1".to_string(), image));
                for j in 0..q {
                    images.push((format!("t{}", j + 1), GrassmannElement::odd_generator(&sig, j)));
                }
                decl.transitions.push(TransitionDecl { from: names[a].into(), to: names[b].into(), images });
            }
        }
        if rng.gen_bool(0.5) {
            decl.weights = Some(names[..n].iter().map(|s| (s.to_string(), small_rational(rng).abs())).collect());
        }
        decl
    }

    /// A random, fully resolved document whose canonical text parses back to itself.
    pub fn random_document<R: Rng>(rng: &mut R) -> Model {
        let (p, q) = (rng.gen_range(1..=2), rng.gen_range(0..=3));
        let sig = AlgebraSignature::new(p, q).unwrap();
        let mut items = vec![Item::Ring(sig.clone())];
        let mut rels = Vec::new();
        for _ in 0..rng.gen_range(0..=2) {
            if let Some(r) = relation(rng, &sig) {
                rels.push(r.clone());
                items.push(Item::Relation(r));
            }
        }
        if rng.gen_bool(0.6) {
            let (d, big_d) = bounds(rng, &rels);
            items.push(Item::Bounds { d, big_d });
        }
        for i in 0..rng.gen_range(0..=2) {
            items.push(Item::Element { name: format!("e{i}"), value: random_element(rng, &sig, None, 2, 3) });
        }
        let mut derivs = vec![EULER.to_string()];
        for name in ["Da", "Db"] {
            if rng.gen_bool(0.5) {
                if let Some(value) = derivation(rng, &sig) {
                    derivs.push(name.to_string());
                    items.push(Item::Derivation { name: name.into(), value });
                }
            }
        }
        let has_cover = rng.gen_bool(0.4);
        if has_cover {
            items.push(Item::Cover(cover(rng)));
        }
        let elem = |rng: &mut R| random_element(rng, &sig, None, 2, 3);
        for _ in 0..rng.gen_range(1..=6) {
            let pick = |rng: &mut R| derivs[rng.gen_range(0..derivs.len())].clone();
            let cmd = match rng.gen_range(0..15) {
                0 => Command::Split {
                    d: rng.gen_bool(0.5).then(|| rng.gen_range(1..=3)),
                    big_d: rng.gen_bool(0.5).then(|| rng.gen_range(4..=6)),
                },
                1 => Command::Gr(rng.gen_range(0..=3)),
                2 => Command::Euler,
                3 => Command::Decompose { element: elem(rng), by: rng.gen_bool(0.5).then(|| pick(rng)) },
                4 => Command::Apply { derivation: pick(rng), element: elem(rng) },
                5 => {
                    let k = rng.gen_range(1..=2);
                    let args = (0..k).map(|_| random_element(rng, &sig, Some(Parity::Even), 2, 2)).collect();
                    Command::Smooth { function: smooth_fn(rng, k), args }
                }
                6 => Command::Member(elem(rng)),
                7 => Command::Normal(elem(rng)),
                8 => Command::Reduced,
                9 => Command::Adapted { derivation: pick(rng), big_d: rng.gen_bool(0.5).then(|| rng.gen_range(3..=5)) },
                10 => Command::Leibniz { derivation: pick(rng), trials: rng.gen_bool(0.5).then(|| rng.gen_range(1..=50)) },
                11 if has_cover => Command::Cocycles,
                12 if has_cover => Command::Batchelor,
                _ => Command::Show(elem(rng)),
            };
            items.push(Item::Command(cmd));
        }
        Model { items }
    }
}
