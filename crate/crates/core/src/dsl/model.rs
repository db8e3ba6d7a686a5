use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_rational::BigRational;

use crate::cech::{Chart, GluingData, PartitionWeights};
use crate::coeff::{format_rational, SmoothFn};
use crate::derivations::SuperDerivation;
use crate::error::{KernelError, Result};
use crate::grassmann::{GrassmannElement, Morphism, Signature};
use crate::presentation::{Presentation, DEFAULT_COEFF_DEGREE, DEFAULT_TRUNCATION};

/// Built-in name of the Euler vector field in derivation references.
pub const EULER: &str = "euler";

/// A parsed document: declarations and commands in source order, fully resolved.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct Model {
    pub items: Vec<Item>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Item {
    Ring(Signature),
    Relation(GrassmannElement),
    Bounds { d: Option<u32>, big_d: Option<u32> },
    Element { name: String, value: GrassmannElement },
    Derivation { name: String, value: SuperDerivation },
    Cover(CoverDecl),
    Command(Command),
}

#[derive(Clone, PartialEq, Debug)]
pub struct ChartDecl {
    pub name: String,
    pub sig: Signature,
    pub relations: Vec<GrassmannElement>,
    pub d: Option<u32>,
    pub big_d: Option<u32>,
}

#[derive(Clone, PartialEq, Debug)]
pub struct TransitionDecl {
    pub from: String,
    pub to: String,
    /// Image of every generator of the source chart, in generator order.
    pub images: Vec<(String, GrassmannElement)>,
}

#[derive(Clone, PartialEq, Debug, Default)]
pub struct CoverDecl {
    pub charts: Vec<ChartDecl>,
    pub overlaps: Vec<Vec<String>>,
    pub transitions: Vec<TransitionDecl>,
    pub weights: Option<Vec<(String, BigRational)>>,
}

#[derive(Clone, PartialEq, Debug)]
pub enum Command {
    Split { d: Option<u32>, big_d: Option<u32> },
    Gr(u32),
    Euler,
    Decompose { element: GrassmannElement, by: Option<String> },
    Apply { derivation: String, element: GrassmannElement },
    Smooth { function: SmoothFn, args: Vec<GrassmannElement> },
    Member(GrassmannElement),
    Normal(GrassmannElement),
    Reduced,
    Adapted { derivation: String, big_d: Option<u32> },
    Leibniz { derivation: String, trials: Option<u32> },
    Cocycles,
    Batchelor,
    Show(GrassmannElement),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Split { .. } => "split",
            Command::Gr(_) => "gr",
            Command::Euler => "euler",
            Command::Decompose { .. } => "decompose",
            Command::Apply { .. } => "apply",
            Command::Smooth { .. } => "smooth",
            Command::Member(_) => "member",
            Command::Normal(_) => "normal",
            Command::Reduced => "reduced",
            Command::Adapted { .. } => "adapted",
            Command::Leibniz { .. } => "leibniz",
            Command::Cocycles => "cocycles",
            Command::Batchelor => "batchelor",
            Command::Show(_) => "show",
        }
    }

    pub fn to_text(&self) -> String {
        match self {
            Command::Split { d, big_d } => format!("split{};", bounds_text(*d, *big_d)),
            Command::Gr(k) => format!("gr {k};"),
            Command::Euler => "euler;".into(),
            Command::Decompose { element, by: None } => format!("decompose {element};"),
            Command::Decompose { element, by: Some(name) } => format!("decompose {element} by {name};"),
            Command::Apply { derivation, element } => format!("apply {derivation} to {element};"),
            Command::Smooth { function, args } => format!(
                "smooth {} at {};",
                function.to_text(),
                args.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
            ),
            Command::Member(e) => format!("member {e};"),
            Command::Normal(e) => format!("normal {e};"),
            Command::Reduced => "reduced;".into(),
            Command::Adapted { derivation, big_d: None } => format!("adapted {derivation};"),
            Command::Adapted { derivation, big_d: Some(b) } => format!("adapted {derivation} D={b};"),
            Command::Leibniz { derivation, trials: None } => format!("leibniz {derivation};"),
            Command::Leibniz { derivation, trials: Some(n) } => format!("leibniz {derivation} {n};"),
            Command::Cocycles => "cocycles;".into(),
            Command::Batchelor => "batchelor;".into(),
            Command::Show(e) => format!("show {e};"),
        }
    }
}

fn bounds_text(d: Option<u32>, big_d: Option<u32>) -> String {
    let mut s = String::new();
    if let Some(d) = d {
        let _ = write!(s, " d={d}");
    }
    if let Some(b) = big_d {
        let _ = write!(s, " D={b}");
    }
    s
}

/// Resolves optional bounds against the relations: `d = 2`, `D = max(4, max relation degree)`.
pub fn resolve_bounds(relations: &[GrassmannElement], d: Option<u32>, big_d: Option<u32>) -> (u32, u32) {
    let max_rel = relations.iter().filter_map(GrassmannElement::total_degree).max().unwrap_or(0);
    let big_d = big_d.unwrap_or_else(|| DEFAULT_TRUNCATION.max(max_rel).max(d.unwrap_or(0)));
    (d.unwrap_or(DEFAULT_COEFF_DEGREE.min(big_d)), big_d)
}

impl ChartDecl {
    pub fn presentation(&self, max_degree: Option<u32>) -> Result<Presentation> {
        let (d, big_d) = resolve_bounds(&self.relations, self.d, max_degree.or(self.big_d));
        Presentation::new(&self.sig, self.relations.clone(), d.min(big_d), big_d)
    }

    fn to_text(&self) -> String {
        let mut s = format!("chart {}: ring p={} q={}", self.name, self.sig.p(), self.sig.q());
        if !self.relations.is_empty() || self.d.is_some() || self.big_d.is_some() {
            s.push_str(" {");
            for r in &self.relations {
                let _ = write!(s, " relation {r};");
            }
            if self.d.is_some() || self.big_d.is_some() {
                let _ = write!(s, " bounds{};", bounds_text(self.d, self.big_d));
            }
            s.push_str(" }");
        }
        s.push(';');
        s
    }
}

impl CoverDecl {
    pub fn chart_index(&self, name: &str) -> Option<usize> {
        self.charts.iter().position(|c| c.name == name)
    }

    /// The gluing data and, when weights were declared, the partition of unity.
    pub fn gluing(&self, max_degree: Option<u32>) -> Result<(GluingData, Option<PartitionWeights>)> {
        let charts = self
            .charts
            .iter()
            .map(|c| Ok(Chart { name: c.name.clone(), model: c.presentation(max_degree)? }))
            .collect::<Result<Vec<_>>>()?;
        let index = |name: &str| {
            self.chart_index(name)
                .ok_or_else(|| KernelError::argument(format!("unknown chart {name}")))
        };
        let overlaps = self
            .overlaps
            .iter()
            .map(|o| o.iter().map(|n| index(n)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let mut transitions = BTreeMap::new();
        for t in &self.transitions {
            let (a, b) = (index(&t.from)?, index(&t.to)?);
            let src = &self.charts[a].sig;
            let p = src.p();
            let even = t.images[..p].iter().map(|(_, e)| e.clone()).collect();
            let odd = t.images[p..].iter().map(|(_, e)| e.clone()).collect();
            transitions.insert((a, b), Morphism::new(src, &self.charts[b].sig, even, odd)?);
        }
        let g = GluingData::new(charts, &overlaps, transitions)?;
        let rho = match &self.weights {
            Some(ws) => {
                let mut w = vec![None; self.charts.len()];
                for (name, v) in ws {
                    w[index(name)?] = Some(v.clone());
                }
                let w = w
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| v.ok_or_else(|| KernelError::argument(format!("no weight for chart {}", self.charts[i].name))))
                    .collect::<Result<Vec<_>>>()?;
                Some(PartitionWeights::from_chart_weights(&g, &w)?)
            }
            None => None,
        };
        Ok((g, rho))
    }

    fn to_text(&self) -> String {
        let mut s = String::from("cover {\n");
        for c in &self.charts {
            let _ = writeln!(s, "  {}", c.to_text());
        }
        for o in &self.overlaps {
            let _ = writeln!(s, "  overlap {};", o.join(" "));
        }
        for t in &self.transitions {
            let images: Vec<String> = t.images.iter().map(|(g, e)| format!("{g} -> {e}")).collect();
            let _ = writeln!(s, "  transition {}->{} {{ {} }};", t.from, t.to, images.join("; "));
        }
        if let Some(ws) = &self.weights {
            let parts: Vec<String> = ws.iter().map(|(n, w)| format!("{n}={}", format_rational(w))).collect();
            let _ = writeln!(s, "  weights {};", parts.join(" "));
        }
        s.push('}');
        s
    }
}

impl Item {
    pub fn to_text(&self) -> String {
        match self {
            Item::Ring(sig) => format!("ring p={} q={};", sig.p(), sig.q()),
            Item::Relation(r) => format!("relation {r};"),
            Item::Bounds { d, big_d } => format!("bounds{};", bounds_text(*d, *big_d)),
            Item::Element { name, value } => format!("element {name} = {value};"),
            Item::Derivation { name, value } => format!("derivation {name} = {value};"),
            Item::Cover(c) => c.to_text(),
            Item::Command(c) => c.to_text(),
        }
    }
}

impl Model {
    /// Canonical text: one item per line.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for item in &self.items {
            s.push_str(&item.to_text());
            s.push('\n');
        }
        s
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn signature(&self) -> Option<&Signature> {
        self.items.iter().find_map(|i| match i {
            Item::Ring(s) => Some(s),
            _ => None,
        })
    }

    pub fn relations(&self) -> Vec<GrassmannElement> {
        self.items
            .iter()
            .filter_map(|i| match i {
                Item::Relation(r) => Some(r.clone()),
                _ => None,
            })
            .collect()
    }

    /// The last `bounds` declaration.
    pub fn bounds(&self) -> (Option<u32>, Option<u32>) {
        self.items
            .iter()
            .rev()
            .find_map(|i| match i {
                Item::Bounds { d, big_d } => Some((*d, *big_d)),
                _ => None,
            })
            .unwrap_or((None, None))
    }

    /// The top-level presentation; `max_degree` overrides the declared truncation.
    pub fn presentation(&self, max_degree: Option<u32>) -> Option<Result<Presentation>> {
        let sig = self.signature()?;
        let relations = self.relations();
        let (d, big_d) = self.bounds();
        let (d, big_d) = resolve_bounds(&relations, d, max_degree.or(big_d));
        Some(Presentation::new(sig, relations, d.min(big_d), big_d))
    }

    pub fn derivation(&self, name: &str) -> Option<SuperDerivation> {
        if name == EULER {
            return self.signature().map(SuperDerivation::euler_field);
        }
        self.items.iter().rev().find_map(|i| match i {
            Item::Derivation { name: n, value } if n == name => Some(value.clone()),
            _ => None,
        })
    }

    pub fn cover(&self) -> Option<&CoverDecl> {
        self.items.iter().find_map(|i| match i {
            Item::Cover(c) => Some(c),
            _ => None,
        })
    }

    pub fn commands(&self) -> impl Iterator<Item = &Command> {
        self.items.iter().filter_map(|i| match i {
            Item::Command(c) => Some(c),
            _ => None,
        })
    }
}
