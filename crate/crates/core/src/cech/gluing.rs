use std::collections::{BTreeMap, BTreeSet};

use crate::error::{KernelError, Result};
use crate::grassmann::{GrassmannElement, Morphism, Signature};
use crate::presentation::Presentation;

/// Maximum number of charts (regions are bitmasks over charts).
pub const MAX_CHARTS: usize = 64;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Chart {
    pub name: String,
    pub model: Presentation,
}

/// A finite cover: charts with local models, the overlap nerve, and transition morphisms.
///
/// A transition `φ(α, β)` maps the algebra of chart α into that of chart β (images of
/// α's generators written in β's generators). The nerve is stored as regions: bitmasks
/// of charts that have a common overlap, closed under taking faces. Singletons are
/// always regions.
#[derive(Clone, Debug)]
pub struct GluingData {
    charts: Vec<Chart>,
    regions: BTreeSet<u64>,
    given: BTreeMap<(usize, usize), Morphism>,
    derived: BTreeMap<(usize, usize), Morphism>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub enum CocycleViolation {
    /// `φ(α, α)` is not the identity.
    Diagonal { chart: String, generator: String, image: GrassmannElement },
    /// `φ(β, α) ∘ φ(α, β)` is not the identity (or `φ(α, β)` cannot be inverted).
    Inverse { from: String, to: String, generator: String, image: Option<GrassmannElement> },
    /// `φ(β, γ) ∘ φ(α, β) ≠ φ(α, γ)` on a triple overlap.
    Triple {
        charts: [String; 3],
        generator: String,
        composed: GrassmannElement,
        direct: GrassmannElement,
    },
    /// An overlap without a transition in this direction.
    Missing { from: String, to: String },
}

#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct CocycleReport {
    pub pairs_checked: usize,
    pub triples_checked: usize,
    pub violations: Vec<CocycleViolation>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn members(region: u64) -> impl Iterator<Item = usize> {
    (0..MAX_CHARTS).filter(move |&i| region & (1 << i) != 0)
}

impl GluingData {
    /// `overlaps` lists chart-index sets with nonempty common intersection; every face of
    /// a listed set is added. Transitions are keyed by (source chart, target chart).
    pub fn new(
        charts: Vec<Chart>,
        overlaps: &[Vec<usize>],
        transitions: BTreeMap<(usize, usize), Morphism>,
    ) -> Result<Self> {
        if charts.is_empty() {
            return Err(KernelError::argument("a cover needs at least one chart"));
        }
        if charts.len() > MAX_CHARTS {
            return Err(KernelError::argument(format!("at most {MAX_CHARTS} charts are supported")));
        }
        let mut names = BTreeSet::new();
        for c in &charts {
            if !names.insert(c.name.as_str()) {
                return Err(KernelError::argument(format!("duplicate chart name {}", c.name)));
            }
        }
        let mut regions: BTreeSet<u64> = (0..charts.len()).map(|i| 1u64 << i).collect();
        for o in overlaps {
            let mut mask = 0u64;
            for &i in o {
                if i >= charts.len() {
                    return Err(KernelError::argument("overlap names an unknown chart"));
                }
                mask |= 1 << i;
            }
            // every nonempty subset is a face
            let mut sub = mask;
            while sub != 0 {
                regions.insert(sub);
                sub = (sub - 1) & mask;
            }
        }
        for (&(a, b), m) in &transitions {
            if a >= charts.len() || b >= charts.len() {
                return Err(KernelError::argument("transition names an unknown chart"));
            }
            if a != b && !regions.contains(&((1 << a) | (1 << b))) {
                return Err(KernelError::argument(format!(
                    "transition {} -> {} is given but the charts do not overlap",
                    charts[a].name, charts[b].name
                )));
            }
            if m.source() != charts[a].model.signature() || m.target() != charts[b].model.signature() {
                return Err(KernelError::argument(format!(
                    "transition {} -> {} does not match the chart algebras",
                    charts[a].name, charts[b].name
                )));
            }
        }
        let mut derived = BTreeMap::new();
        for (&(a, b), m) in &transitions {
            if a != b && !transitions.contains_key(&(b, a)) {
                if let Ok(inv) = m.inverse() {
                    derived.insert((b, a), inv);
                }
            }
        }
        Ok(GluingData { charts, regions, given: transitions, derived })
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    pub fn signature(&self, chart: usize) -> &Signature {
        self.charts[chart].model.signature()
    }

    /// All regions of the nerve, singletons included.
    pub fn regions(&self) -> impl Iterator<Item = u64> + '_ {
        self.regions.iter().copied()
    }

    /// The maximal listed overlaps with at least two charts, for printing.
    pub fn maximal_overlaps(&self) -> Vec<u64> {
        let multi: Vec<u64> = self.regions.iter().copied().filter(|r| r.count_ones() >= 2).collect();
        multi
            .iter()
            .copied()
            .filter(|&r| !multi.iter().any(|&s| s != r && s & r == r))
            .collect()
    }

    /// Transitions exactly as given.
    pub fn given_transitions(&self) -> &BTreeMap<(usize, usize), Morphism> {
        &self.given
    }

    /// `φ(a, b)`: the given transition, an inverse of the reverse one, or the identity on
    /// the diagonal.
    pub fn transition(&self, a: usize, b: usize) -> Option<Morphism> {
        if let Some(m) = self.given.get(&(a, b)).or_else(|| self.derived.get(&(a, b))) {
            return Some(m.clone());
        }
        (a == b).then(|| Morphism::identity(self.signature(a)))
    }

    pub fn region_name(&self, region: u64) -> String {
        members(region).map(|i| self.charts[i].name.as_str()).collect::<Vec<_>>().join(" ")
    }

    /// Checks identity on the diagonal, mutual inverses on pairs and compatibility on
    /// triples, by exact composition of generator images.
    pub fn check_cocycles(&self) -> CocycleReport {
        let mut report = CocycleReport::default();
        let name = |i: usize| self.charts[i].name.clone();
        for (&(a, b), m) in &self.given {
            if a == b {
                if let Some(w) = m.mismatch(&Morphism::identity(self.signature(a))) {
                    report.violations.push(CocycleViolation::Diagonal {
                        chart: name(a),
                        generator: w.generator,
                        image: w.left,
                    });
                }
            }
        }
        for region in self.regions.iter().filter(|r| r.count_ones() == 2) {
            let ids: Vec<usize> = members(*region).collect();
            for (a, b) in [(ids[0], ids[1]), (ids[1], ids[0])] {
                report.pairs_checked += 1;
                let (Some(f), Some(g)) = (self.transition(a, b), self.transition(b, a)) else {
                    if self.transition(a, b).is_none() {
                        let both_missing = !self.given.contains_key(&(a, b)) && !self.given.contains_key(&(b, a));
                        report.violations.push(if both_missing {
                            CocycleViolation::Missing { from: name(a), to: name(b) }
                        } else {
                            CocycleViolation::Inverse { from: name(b), to: name(a), generator: String::new(), image: None }
                        });
                    }
                    continue;
                };
                let round = f.then(&g).expect("chart algebras match");
                if let Some(w) = round.mismatch(&Morphism::identity(self.signature(a))) {
                    report.violations.push(CocycleViolation::Inverse {
                        from: name(a),
                        to: name(b),
                        generator: w.generator,
                        image: Some(w.left),
                    });
                }
            }
        }
        for region in self.regions.iter().filter(|r| r.count_ones() == 3) {
            let ids: Vec<usize> = members(*region).collect();
            let (a, b, c) = (ids[0], ids[1], ids[2]);
            report.triples_checked += 1;
            let (Some(ab), Some(bc), Some(ac)) = (self.transition(a, b), self.transition(b, c), self.transition(a, c))
            else {
                continue;
            };
            let composed = ab.then(&bc).expect("chart algebras match");
            if let Some(w) = composed.mismatch(&ac) {
                report.violations.push(CocycleViolation::Triple {
                    charts: [name(a), name(b), name(c)],
                    generator: w.generator,
                    composed: w.left,
                    direct: w.right,
                });
            }
        }
        report
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grassmann::AlgebraSignature;

    fn shift(s: &Signature, c: i64) -> Morphism {
        let x = GrassmannElement::even_generator(s, 0);
        let t12 = &GrassmannElement::odd_generator(s, 0) * &GrassmannElement::odd_generator(s, 1);
        Morphism::new(
            s,
            s,
            vec![&x + &t12.scale(&crate::coeff::rat_int(c))],
            vec![GrassmannElement::odd_generator(s, 0), GrassmannElement::odd_generator(s, 1)],
        )
        .unwrap()
    }

    fn charts(s: &Signature, n: usize) -> Vec<Chart> {
        ["A", "B", "C"][..n]
            .iter()
            .map(|name| Chart { name: name.to_string(), model: Presentation::free(s, 2, 4).unwrap() })
            .collect()
    }

    #[test]
    fn two_charts_with_one_transition_pass() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let g = GluingData::new(charts(&s, 2), &[vec![0, 1]], BTreeMap::from([((0, 1), shift(&s, 1))])).unwrap();
        assert!(g.check_cocycles().passed());
        assert_eq!(g.transition(1, 0).unwrap(), shift(&s, -1));
    }

    #[test]
    fn non_identity_diagonal_is_reported() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let g = GluingData::new(charts(&s, 1), &[], BTreeMap::from([((0, 0), shift(&s, 1))])).unwrap();
        let r = g.check_cocycles();
        assert!(matches!(&r.violations[..], [CocycleViolation::Diagonal { generator, .. }] if generator == "x1"));
    }

    #[test]
    fn broken_triple_is_reported() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let t = BTreeMap::from([((0, 1), shift(&s, 1)), ((1, 2), shift(&s, 1)), ((0, 2), shift(&s, 1))]);
        let g = GluingData::new(charts(&s, 3), &[vec![0, 1, 2]], t).unwrap();
        let r = g.check_cocycles();
        assert_eq!(r.triples_checked, 1);
        assert!(matches!(
            &r.violations[..],
            [CocycleViolation::Triple { charts, generator, .. }] if charts == &["A", "B", "C"] && generator == "x1"
        ));
    }

    #[test]
    fn faces_of_overlaps_are_regions() {
        let s = AlgebraSignature::new(1, 2).unwrap();
        let g = GluingData::new(charts(&s, 3), &[vec![0, 1, 2]], BTreeMap::new()).unwrap();
        assert_eq!(g.regions().count(), 7);
        assert_eq!(g.maximal_overlaps(), vec![0b111]);
        let r = g.check_cocycles();
        assert_eq!(r.violations.len(), 6);
    }
}
