use std::collections::BTreeMap;

use super::cochain::{pou_coboundary, Cochain0, Cochain1, PartitionWeights};
use super::gluing::{members, GluingData};
use crate::derivations::SuperDerivation;
use crate::error::{KernelError, Result};
use crate::grassmann::{GrassmannElement, Morphism, Parity, Signature};
use crate::presentation::{split_search, SplitVerdict};

/// Chart-local maps `Φ_α(S) : Gr O_α → O_α`, one per chart α and region S ∋ α. The
/// associated graded algebra of a free chart is identified with the same free algebra
/// (x̄ ↦ x1.., ξ ↦ t1..), graded by odd weight.
pub type LocalLifts = BTreeMap<(usize, u64), Morphism>;

fn transition(g: &GluingData, a: usize, b: usize) -> Result<Morphism> {
    g.transition(a, b).ok_or_else(|| {
        KernelError::Precondition(format!(
            "no transition {} -> {}",
            g.charts()[a].name,
            g.charts()[b].name
        ))
    })
}

/// The reference chart of a region: its first chart.
fn reference(region: u64) -> usize {
    region.trailing_zeros() as usize
}

/// `φ(α, r) ∘ Φ_α ∘ Gr(φ(r, α))`: a lift of chart α written in chart r's coordinates.
fn to_frame(g: &GluingData, phi: &Morphism, alpha: usize, r: usize) -> Result<Morphism> {
    if alpha == r {
        return Ok(phi.clone());
    }
    transition(g, r, alpha)?.graded().then(phi)?.then(&transition(g, alpha, r)?)
}

fn from_frame(g: &GluingData, t: &Morphism, alpha: usize, r: usize) -> Result<Morphism> {
    if alpha == r {
        return Ok(t.clone());
    }
    transition(g, alpha, r)?.graded().then(t)?.then(&transition(g, r, alpha)?)
}

/// Generator-wise difference `ψ - φ`, as an even derivation (even generators get even
/// coefficients, odd generators odd ones).
fn difference(phi: &Morphism, psi: &Morphism) -> SuperDerivation {
    let even = phi.even_images().iter().zip(psi.even_images()).map(|(a, b)| b - a).collect();
    let odd = phi.odd_images().iter().zip(psi.odd_images()).map(|(a, b)| b - a).collect();
    SuperDerivation::with_parity(phi.target(), Parity::Even, even, odd).expect("images keep their parity")
}

fn subtract(phi: &Morphism, delta: &SuperDerivation) -> Morphism {
    let even = phi.even_images().iter().zip(delta.even_coeffs()).map(|(a, d)| a - d).collect();
    let odd = phi.odd_images().iter().zip(delta.odd_coeffs()).map(|(a, d)| a - d).collect();
    Morphism::new(phi.source(), phi.target(), even, odd).expect("parities are preserved")
}

/// `ω_{αβ}(S) = Φ_β(S) - Φ_α(S)` on every region with at least two charts, after writing
/// both lifts in the region's reference chart. With `weight`, only that odd-weight part
/// of the generator images is kept.
pub fn cochain_difference(g: &GluingData, lifts: &LocalLifts, weight: Option<u32>) -> Result<Cochain1<SuperDerivation>> {
    let sig = g.signature(0).clone();
    let mut omega = Cochain1::new(SuperDerivation::zero(&sig, Parity::Even));
    for region in g.regions().filter(|r| r.count_ones() >= 2) {
        let r = reference(region);
        let mut framed = BTreeMap::new();
        for a in members(region) {
            let phi = lifts.get(&(a, region)).ok_or_else(|| {
                KernelError::argument(format!(
                    "no lift for chart {} on region {{{}}}",
                    g.charts()[a].name,
                    g.region_name(region)
                ))
            })?;
            if phi.source() != &sig || phi.target() != &sig {
                return Err(KernelError::argument("lifts must share the chart algebra"));
            }
            framed.insert(a, to_frame(g, phi, a, r)?);
        }
        let ids: Vec<usize> = members(region).collect();
        for (i, &a) in ids.iter().enumerate() {
            for &b in &ids[i + 1..] {
                let d = difference(&framed[&a], &framed[&b]);
                let d = match weight {
                    Some(k) => d.weight_component(k),
                    None => d,
                };
                omega.set(region, a, b, d);
            }
        }
    }
    Ok(omega)
}

/// Lifts equal to the identity identification on every chart and region.
pub fn identity_lifts(g: &GluingData) -> LocalLifts {
    let mut out = LocalLifts::new();
    for region in g.regions() {
        for a in members(region) {
            out.insert((a, region), Morphism::identity(g.signature(a)));
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct StageReport {
    pub stage: u32,
    /// Number of nonzero obstruction entries before correction.
    pub obstruction_entries: usize,
    /// Number of nonzero correction entries `τ_α(S)`.
    pub correction_entries: usize,
}

/// Outcome of [`project_and_split`].
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BatchelorSplitting {
    pub stages: Vec<StageReport>,
    /// `Φ_α(S)`, the glued chart-wise isomorphisms `Gr O_α → O_α`.
    pub lifts: LocalLifts,
    /// `Ψ_α(S) = Φ_α(S)^{-1}`.
    pub inverses: LocalLifts,
    /// `π ∘ σ = id` on every chart and region, with `σ = Φ` restricted to even generators.
    pub projection_ok: bool,
    /// `Φ ∘ Ψ = id` and `Ψ ∘ Φ = id`.
    pub inverse_ok: bool,
    /// `Φ_β = φ(α, β) ∘ Φ_α ∘ Gr(φ(α, β))^{-1}` on every overlap.
    pub overlap_ok: bool,
    /// `Φ(ab) = Φ(a)Φ(b)` on all generator pairs.
    pub multiplicative_ok: bool,
}

impl BatchelorSplitting {
    pub fn verified(&self) -> bool {
        self.projection_ok && self.inverse_ok && self.overlap_ok && self.multiplicative_ok
    }

    /// `σ_α(S)`: the images of the even generators.
    pub fn sigma(&self, chart: usize, region: u64) -> Option<&[GrassmannElement]> {
        self.lifts.get(&(chart, region)).map(Morphism::even_images)
    }
}

/// Glues chart-local splittings of a cover of free charts into compatible chart-wise
/// isomorphisms `Φ: Gr O → O`, killing the weight-i obstruction cocycle with the partition
/// of unity at each stage i = 1..q+1.
pub fn project_and_split(g: &GluingData, rho: &PartitionWeights) -> Result<BatchelorSplitting> {
    project_and_split_from(g, rho, identity_lifts(g))
}

/// [`project_and_split`] starting from given local lifts instead of the identity.
pub fn project_and_split_from(g: &GluingData, rho: &PartitionWeights, mut lifts: LocalLifts) -> Result<BatchelorSplitting> {
    let sig = check_models(g)?;
    let cocycles = g.check_cocycles();
    if !cocycles.passed() {
        return Err(KernelError::Precondition(format!(
            "gluing data violates the cocycle conditions ({} violations)",
            cocycles.violations.len()
        )));
    }
    let q = sig.q() as u32;
    let mut stages = Vec::new();
    for stage in 1..=q + 1 {
        let omega = cochain_difference(g, &lifts, Some(stage))?;
        let tau: Cochain0<SuperDerivation> = pou_coboundary(&omega, rho)?;
        let correction_entries = tau.entries().filter(|(_, _, v)| !v.is_zero()).count();
        for (a, region, t) in tau.entries() {
            if t.is_zero() {
                continue;
            }
            let r = reference(region);
            let phi = &lifts[&(a, region)];
            let framed = subtract(&to_frame(g, phi, a, r)?, t);
            lifts.insert((a, region), from_frame(g, &framed, a, r)?);
        }
        stages.push(StageReport { stage, obstruction_entries: omega.nonzero_count(), correction_entries });
    }

    let mut inverses = LocalLifts::new();
    let mut projection_ok = true;
    let mut inverse_ok = true;
    let mut multiplicative_ok = true;
    for (&key, phi) in &lifts {
        for (i, img) in phi.even_images().iter().enumerate() {
            projection_ok &= img.body() == crate::coeff::Polynomial::var(sig.p(), i);
        }
        let psi = phi.inverse()?;
        inverse_ok &= phi.then(&psi)?.is_identity() && psi.then(phi)?.is_identity();
        multiplicative_ok &= is_multiplicative(phi)?;
        inverses.insert(key, psi);
    }
    let mut overlap_ok = true;
    for region in g.regions().filter(|r| r.count_ones() >= 2) {
        for a in members(region) {
            for b in members(region).filter(|&b| b != a) {
                let expected = transition(g, b, a)?
                    .graded()
                    .then(&lifts[&(a, region)])?
                    .then(&transition(g, a, b)?)?;
                overlap_ok &= expected == lifts[&(b, region)];
            }
        }
    }
    Ok(BatchelorSplitting { stages, lifts, inverses, projection_ok, inverse_ok, overlap_ok, multiplicative_ok })
}

fn check_models(g: &GluingData) -> Result<Signature> {
    let sig = g.signature(0).clone();
    for chart in g.charts() {
        let model = &chart.model;
        if !model.signature().same_shape(&sig) {
            return Err(KernelError::UnsupportedModel(format!(
                "chart {} has dimension {} but the cover uses {}",
                chart.name,
                model.signature(),
                sig
            )));
        }
        if model.is_free() {
            continue;
        }
        let verdict = split_search(model, model.coeff_degree(), model.truncation())?;
        return Err(KernelError::UnsupportedModel(match verdict {
            SplitVerdict::NoCertificate { d, big_d, .. } => format!(
                "chart {} is not locally split: no adapted derivation at d={d}, D={big_d}",
                chart.name
            ),
            SplitVerdict::Certificate(_) => format!(
                "chart {} splits but is not given in split coordinates; present it as a free chart",
                chart.name
            ),
        }));
    }
    Ok(sig)
}

fn is_multiplicative(phi: &Morphism) -> Result<bool> {
    let sig = phi.source();
    let gens: Vec<GrassmannElement> = (0..sig.p())
        .map(|i| GrassmannElement::even_generator(sig, i))
        .chain((0..sig.q()).map(|j| GrassmannElement::odd_generator(sig, j)))
        .collect();
    for a in &gens {
        for b in &gens {
            if phi.apply(&(a * b))? != &phi.apply(a)? * &phi.apply(b)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::gluing::Chart;
    use crate::coeff::rat;
    use crate::grassmann::AlgebraSignature;
    use crate::presentation::Presentation;

    fn two_chart_cover() -> (Signature, GluingData) {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let x = GrassmannElement::even_generator(&s, 0);
        let t = |j| GrassmannElement::odd_generator(&s, j);
        let phi = Morphism::new(&s, &s, vec![&x + &(&t(0) * &t(1))], vec![t(0), t(1)]).unwrap();
        let charts = ["A", "B"]
            .iter()
            .map(|n| Chart { name: n.to_string(), model: Presentation::free(&s, 2, 4).unwrap() })
            .collect();
        let g = GluingData::new(charts, &[vec![0, 1]], BTreeMap::from([((0, 1), phi)])).unwrap();
        (s, g)
    }

    #[test]
    fn two_chart_run_glues_the_half_shift() {
        let (s, g) = two_chart_cover();
        let out = project_and_split(&g, &PartitionWeights::uniform(&g)).unwrap();
        assert!(out.verified(), "{out:?}");
        let x = GrassmannElement::even_generator(&s, 0);
        let t12 = &GrassmannElement::odd_generator(&s, 0) * &GrassmannElement::odd_generator(&s, 1);
        assert_eq!(out.sigma(0, 0b11).unwrap(), &[&x - &t12.scale(&rat(1, 2))]);
        assert_eq!(out.sigma(1, 0b11).unwrap(), &[&x + &t12.scale(&rat(1, 2))]);
        assert_eq!(out.stages[1].obstruction_entries, 1);
        assert!(out.stages.iter().skip(2).all(|s| s.obstruction_entries == 0));
    }

    #[test]
    fn rerun_from_glued_lifts_is_idempotent() {
        let (_, g) = two_chart_cover();
        let rho = PartitionWeights::uniform(&g);
        let first = project_and_split(&g, &rho).unwrap();
        let second = project_and_split_from(&g, &rho, first.lifts.clone()).unwrap();
        assert_eq!(first.lifts, second.lifts);
        assert!(second.stages.iter().all(|s| s.obstruction_entries == 0));
    }

    #[test]
    fn single_free_chart_is_the_identity() {
        let s = AlgebraSignature::new(2, 3).unwrap();
        let g = GluingData::new(
            vec![Chart { name: "U".into(), model: Presentation::free(&s, 2, 4).unwrap() }],
            &[],
            BTreeMap::new(),
        )
        .unwrap();
        let out = project_and_split(&g, &PartitionWeights::uniform(&g)).unwrap();
        assert!(out.verified());
        assert!(out.lifts.values().all(Morphism::is_identity));
    }

    #[test]
    fn non_split_chart_is_rejected() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let x = GrassmannElement::even_generator(&s, 0);
        let t12 = &GrassmannElement::odd_generator(&s, 0) * &GrassmannElement::odd_generator(&s, 1);
        let bad = Presentation::new(&s, vec![&(&x * &x) + &t12], 2, 4).unwrap();
        let g = GluingData::new(
            vec![
                Chart { name: "A".into(), model: Presentation::free(&s, 2, 4).unwrap() },
                Chart { name: "B".into(), model: bad },
            ],
            &[vec![0, 1]],
            BTreeMap::from([((0, 1), Morphism::identity(&s))]),
        )
        .unwrap();
        let err = project_and_split(&g, &PartitionWeights::uniform(&g)).unwrap_err();
        assert!(matches!(err, KernelError::UnsupportedModel(_)));
    }

    #[test]
    fn equal_lifts_have_zero_difference() {
        let (_, g) = two_chart_cover();
        let mut lifts = identity_lifts(&g);
        // in A's coordinates, B's identity lift reads as the inverse transition
        lifts.insert((0, 0b11), g.transition(1, 0).unwrap());
        let omega = cochain_difference(&g, &lifts, None).unwrap();
        assert_eq!(omega.nonzero_count(), 0);
    }
}
