use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::gluing::{members, GluingData};
use crate::derivations::SuperDerivation;
use crate::error::{KernelError, Result};
use crate::grassmann::GrassmannElement;

/// Values a Čech cochain can take: a ℚ-vector space.
pub trait CochainValue: Clone + PartialEq + Debug {
    fn zero_like(&self) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, c: &BigRational) -> Self;
    fn is_zero_value(&self) -> bool;
}

impl CochainValue for BigRational {
    fn zero_like(&self) -> Self {
        BigRational::zero()
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, c: &BigRational) -> Self {
        self * c
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl CochainValue for GrassmannElement {
    fn zero_like(&self) -> Self {
        GrassmannElement::zero(self.signature())
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, c: &BigRational) -> Self {
        self.scale(c)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

impl CochainValue for SuperDerivation {
    fn zero_like(&self) -> Self {
        SuperDerivation::zero(self.signature(), self.parity())
    }
    fn plus(&self, other: &Self) -> Self {
        self.try_add(other).expect("cochain entries share algebra and parity")
    }
    fn minus(&self, other: &Self) -> Self {
        self.try_add(&other.scale(&-BigRational::one()))
            .expect("cochain entries share algebra and parity")
    }
    fn times(&self, c: &BigRational) -> Self {
        self.scale(c)
    }
    fn is_zero_value(&self) -> bool {
        self.is_zero()
    }
}

/// A 0-cochain: one value per (chart, region) with the chart in the region.
#[derive(Clone, PartialEq, Debug)]
pub struct Cochain0<V> {
    zero: V,
    entries: BTreeMap<(usize, u64), V>,
}

impl<V: CochainValue> Cochain0<V> {
    pub fn new(zero: V) -> Self {
        Cochain0 { zero, entries: BTreeMap::new() }
    }

    pub fn set(&mut self, chart: usize, region: u64, v: V) {
        assert!(region & (1 << chart) != 0, "chart is not part of the region");
        self.entries.insert((chart, region), v);
    }

    pub fn get(&self, chart: usize, region: u64) -> V {
        self.entries.get(&(chart, region)).cloned().unwrap_or_else(|| self.zero.clone())
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, u64, &V)> {
        self.entries.iter().map(|(&(c, r), v)| (c, r, v))
    }

    /// `(δτ)_{αβ} = τ_β - τ_α` on every region with at least two charts.
    pub fn coboundary(&self, regions: impl IntoIterator<Item = u64>) -> Cochain1<V> {
        let mut out = Cochain1::new(self.zero.clone());
        for region in regions {
            let ids: Vec<usize> = members(region).collect();
            for (i, &a) in ids.iter().enumerate() {
                for &b in &ids[i + 1..] {
                    out.set(region, a, b, self.get(b, region).minus(&self.get(a, region)));
                }
            }
        }
        out
    }
}

/// An antisymmetric 1-cochain `ω_{αβ}` per region; only `α < β` is stored.
#[derive(Clone, PartialEq, Debug)]
pub struct Cochain1<V> {
    zero: V,
    entries: BTreeMap<(u64, usize, usize), V>,
}

/// A triple on which `ω_{αβ} + ω_{βγ} ≠ ω_{αγ}`.
#[derive(Clone, PartialEq, Debug)]
pub struct CocycleDefect<V> {
    pub region: u64,
    pub charts: [usize; 3],
    pub defect: V,
}

impl<V: CochainValue> Cochain1<V> {
    pub fn new(zero: V) -> Self {
        Cochain1 { zero, entries: BTreeMap::new() }
    }

    pub fn zero_value(&self) -> &V {
        &self.zero
    }

    /// Sets `ω_{ab}` (and thereby `ω_{ba} = -ω_{ab}`) on `region`.
    pub fn set(&mut self, region: u64, a: usize, b: usize, v: V) {
        assert!(a != b, "the diagonal of a 1-cochain is zero");
        assert!(region & (1 << a) != 0 && region & (1 << b) != 0, "charts are not part of the region");
        if a < b {
            self.entries.insert((region, a, b), v);
        } else {
            self.entries.insert((region, b, a), v.times(&-BigRational::one()));
        }
    }

    pub fn get(&self, region: u64, a: usize, b: usize) -> V {
        if a == b {
            return self.zero.clone();
        }
        let (lo, hi, flip) = if a < b { (a, b, false) } else { (b, a, true) };
        match self.entries.get(&(region, lo, hi)) {
            Some(v) if flip => v.times(&-BigRational::one()),
            Some(v) => v.clone(),
            None => self.zero.clone(),
        }
    }

    pub fn entries(&self) -> impl Iterator<Item = (u64, usize, usize, &V)> {
        self.entries.iter().map(|(&(r, a, b), v)| (r, a, b, v))
    }

    pub fn regions(&self) -> BTreeSet<u64> {
        self.entries.keys().map(|k| k.0).collect()
    }

    /// Number of nonzero stored entries.
    pub fn nonzero_count(&self) -> usize {
        self.entries.values().filter(|v| !v.is_zero_value()).count()
    }

    /// First triple violating `ω_{αβ} + ω_{βγ} = ω_{αγ}`.
    pub fn cocycle_defect(&self) -> Option<CocycleDefect<V>> {
        for region in self.regions() {
            let ids: Vec<usize> = members(region).collect();
            for (i, &a) in ids.iter().enumerate() {
                for (j, &b) in ids.iter().enumerate().skip(i + 1) {
                    for &c in &ids[j + 1..] {
                        let defect = self.get(region, a, b).plus(&self.get(region, b, c)).minus(&self.get(region, a, c));
                        if !defect.is_zero_value() {
                            return Some(CocycleDefect { region, charts: [a, b, c], defect });
                        }
                    }
                }
            }
        }
        None
    }
}

/// Rational partition-of-unity weights `ρ_α(S)` on every region `S` of the nerve.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PartitionWeights {
    weights: BTreeMap<u64, BTreeMap<usize, BigRational>>,
}

impl PartitionWeights {
    /// Explicit weights per region; checked to be nonnegative, supported on the region's
    /// charts and summing to 1.
    pub fn new(g: &GluingData, weights: BTreeMap<u64, BTreeMap<usize, BigRational>>) -> Result<Self> {
        for region in g.regions() {
            let w = weights.get(&region).ok_or_else(|| {
                KernelError::argument(format!("no partition weights on region {{{}}}", g.region_name(region)))
            })?;
            let mut sum = BigRational::zero();
            for (&chart, v) in w {
                if v.is_negative() {
                    return Err(KernelError::argument("partition weights must be nonnegative"));
                }
                if region & (1 << chart) == 0 && !v.is_zero() {
                    return Err(KernelError::argument(format!(
                        "weight of chart {} must vanish outside the chart",
                        g.charts()[chart].name
                    )));
                }
                sum += v;
            }
            if !sum.is_one() {
                return Err(KernelError::argument(format!(
                    "partition weights on region {{{}}} sum to {} instead of 1",
                    g.region_name(region),
                    crate::coeff::format_rational(&sum)
                )));
            }
        }
        Ok(PartitionWeights { weights })
    }

    /// Per-chart constants `w_α > 0`, normalized on each region: `ρ_α(S) = w_α / Σ_{β∈S} w_β`.
    pub fn from_chart_weights(g: &GluingData, w: &[BigRational]) -> Result<Self> {
        if w.len() != g.charts().len() {
            return Err(KernelError::argument("one weight per chart is required"));
        }
        if w.iter().any(|v| !v.is_positive()) {
            return Err(KernelError::argument("chart weights must be positive"));
        }
        let mut weights = BTreeMap::new();
        for region in g.regions() {
            let total: BigRational = members(region).map(|i| w[i].clone()).sum();
            weights.insert(region, members(region).map(|i| (i, &w[i] / &total)).collect());
        }
        Self::new(g, weights)
    }

    /// Equal weights on every region.
    pub fn uniform(g: &GluingData) -> Self {
        Self::from_chart_weights(g, &vec![BigRational::one(); g.charts().len()]).expect("uniform weights are valid")
    }

    pub fn weight(&self, chart: usize, region: u64) -> BigRational {
        self.weights
            .get(&region)
            .and_then(|w| w.get(&chart))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn regions(&self) -> impl Iterator<Item = u64> + '_ {
        self.weights.keys().copied()
    }
}

/// Solves `δτ = ω` with `τ_α = Σ_γ ρ_γ ω_{γα}` on every region, and checks the result.
pub fn pou_coboundary<V: CochainValue>(omega: &Cochain1<V>, rho: &PartitionWeights) -> Result<Cochain0<V>> {
    if let Some(d) = omega.cocycle_defect() {
        return Err(KernelError::Precondition(format!(
            "not a cocycle on charts ({}, {}, {}) of region {:#b}",
            d.charts[0], d.charts[1], d.charts[2], d.region
        )));
    }
    let mut tau = Cochain0::new(omega.zero_value().clone());
    let regions = omega.regions();
    for &region in &regions {
        for a in members(region) {
            let mut acc = omega.zero_value().clone();
            for g in members(region) {
                let w = rho.weight(g, region);
                if !w.is_zero() {
                    acc = acc.plus(&omega.get(region, g, a).times(&w));
                }
            }
            tau.set(a, region, acc);
        }
    }
    let check = tau.coboundary(regions.iter().copied());
    for (region, a, b, v) in omega.entries() {
        if &check.get(region, a, b) != v {
            return Err(KernelError::Precondition(format!(
                "partition weights do not sum to 1 on region {region:#b}"
            )));
        }
    }
    Ok(tau)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::gluing::Chart;
    use crate::coeff::{rat, rat_int};
    use crate::grassmann::AlgebraSignature;
    use crate::presentation::Presentation;

    fn cover(n: usize) -> GluingData {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let charts = (0..n)
            .map(|i| Chart { name: format!("U{i}"), model: Presentation::free(&s, 2, 4).unwrap() })
            .collect();
        GluingData::new(charts, &[(0..n).collect()], BTreeMap::new()).unwrap()
    }

    #[test]
    fn zero_cocycle_gives_zero() {
        let g = cover(2);
        let mut w = Cochain1::new(rat_int(0));
        w.set(0b11, 0, 1, rat_int(0));
        let tau = pou_coboundary(&w, &PartitionWeights::uniform(&g)).unwrap();
        assert!(tau.entries().all(|(_, _, v)| v.is_zero()));
    }

    #[test]
    fn two_chart_halves() {
        let g = cover(2);
        let mut w = Cochain1::new(rat_int(0));
        w.set(0b11, 0, 1, rat_int(6));
        let tau = pou_coboundary(&w, &PartitionWeights::uniform(&g)).unwrap();
        assert_eq!(tau.get(0, 0b11), rat_int(-3));
        assert_eq!(tau.get(1, 0b11), rat_int(3));
    }

    #[test]
    fn three_chart_cocycle_with_uneven_weights() {
        let g = cover(3);
        let rho = PartitionWeights::from_chart_weights(&g, &[rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
        let f = [rat_int(1), rat(5, 7), rat(-2, 3)];
        let mut w = Cochain1::new(rat_int(0));
        for (a, b) in [(0, 1), (0, 2), (1, 2)] {
            w.set(0b111, a, b, &f[b] - &f[a]);
        }
        let tau = pou_coboundary(&w, &rho).unwrap();
        assert_eq!(tau.coboundary([0b111]).get(0b111, 0, 2), w.get(0b111, 0, 2));
    }

    #[test]
    fn non_cocycle_is_rejected_with_triple() {
        let g = cover(3);
        let mut w = Cochain1::new(rat_int(0));
        w.set(0b111, 0, 1, rat_int(1));
        let err = pou_coboundary(&w, &PartitionWeights::uniform(&g)).unwrap_err();
        assert!(matches!(err, KernelError::Precondition(m) if m.contains("(0, 1, 2)")));
    }

    #[test]
    fn invalid_weights_are_rejected() {
        let g = cover(2);
        let mut bad = BTreeMap::new();
        for r in g.regions() {
            bad.insert(r, members(r).map(|i| (i, rat(1, 3))).collect());
        }
        assert!(PartitionWeights::new(&g, bad).is_err());
        assert!(PartitionWeights::from_chart_weights(&g, &[rat_int(1), rat_int(0)]).is_err());
    }

    #[test]
    fn antisymmetric_storage() {
        let mut w = Cochain1::new(rat_int(0));
        w.set(0b11, 1, 0, rat_int(2));
        assert_eq!(w.get(0b11, 0, 1), rat_int(-2));
        assert_eq!(w.get(0b11, 1, 0), rat_int(2));
    }
}
