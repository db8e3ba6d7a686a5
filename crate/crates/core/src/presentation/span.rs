use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{KernelError, Result};
use crate::grassmann::{GrassmannElement, Monomial, Signature};
use crate::linalg::{Echelon, SparseRow};

/// The ambient monomial basis up to total degree D, in elimination order.
///
/// Column 0 is the most leading monomial: higher total degree first, then lower odd
/// weight, then higher graded-lex polynomial part, then smaller mask. Row reduction
/// pivots on the smallest column, so normal forms keep the trailing monomials.
#[derive(Debug)]
pub struct MonomialIndex {
    sig: Signature,
    max_degree: u32,
    monos: Vec<Monomial>,
    pos: HashMap<Monomial, usize>,
}

impl MonomialIndex {
    pub fn new(sig: &Signature, max_degree: u32) -> Self {
        let mut monos = Monomial::all_up_to(sig, max_degree);
        monos.sort_by(|a, b| {
            b.total_degree()
                .cmp(&a.total_degree())
                .then(a.weight().cmp(&b.weight()))
                .then(b.exp.cmp(&a.exp))
                .then(a.mask.cmp(&b.mask))
        });
        let pos = monos.iter().enumerate().map(|(i, m)| (m.clone(), i)).collect();
        MonomialIndex { sig: sig.clone(), max_degree, monos, pos }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monos
    }

    pub fn column(&self, m: &Monomial) -> Option<usize> {
        self.pos.get(m).copied()
    }

    /// Coordinates of `x`; a term above the truncation degree is an error.
    pub fn to_row(&self, x: &GrassmannElement) -> Result<SparseRow> {
        if let Some(deg) = x.total_degree().filter(|&d| d > self.max_degree) {
            return Err(KernelError::Truncation { degree: deg, bound: self.max_degree });
        }
        Ok(self.to_row_truncated(x))
    }

    /// Coordinates of `x` after dropping every term above the truncation degree.
    pub fn to_row_truncated(&self, x: &GrassmannElement) -> SparseRow {
        x.monomials()
            .filter_map(|(m, c)| self.pos.get(&m).map(|&i| (i, c.clone())))
            .collect()
    }

    pub fn element(&self, row: &SparseRow) -> GrassmannElement {
        let mut out = GrassmannElement::zero(&self.sig);
        for (&i, c) in row {
            out.add_monomial(&self.monos[i], c.clone());
        }
        out
    }

    pub fn monomial_element(&self, i: usize) -> GrassmannElement {
        GrassmannElement::monomial(&self.sig, &self.monos[i], BigRational::one())
    }
}

/// Where a spanning vector came from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SpanLabel {
    /// `truncate_D(m · relation)`.
    Multiple { multiplier: Monomial, relation: usize },
    /// A bare monomial (a generator of a J-power).
    Monomial(Monomial),
}

/// A row-reduced spanning set of a subspace of the truncated free algebra.
#[derive(Clone, Debug)]
pub struct SpanBasis {
    index: Arc<MonomialIndex>,
    echelon: Echelon,
    labels: Vec<SpanLabel>,
}

impl SpanBasis {
    pub fn empty(index: Arc<MonomialIndex>) -> Self {
        SpanBasis { index, echelon: Echelon::tracking(), labels: Vec::new() }
    }

    /// The truncated ideal generated by `relations`: the span of `truncate_D(m · r)` over
    /// every relation `r` and every monomial `m`.
    pub fn ideal(index: Arc<MonomialIndex>, relations: &[GrassmannElement]) -> Self {
        let mut span = Self::empty(index.clone());
        let sig = index.signature().clone();
        let d = index.max_degree();
        for (ri, r) in relations.iter().enumerate() {
            let low = r.monomials().map(|(m, _)| m.total_degree()).min().unwrap_or(0);
            if low > d {
                continue;
            }
            for m in Monomial::all_up_to(&sig, d - low) {
                let v = &GrassmannElement::monomial(&sig, &m, BigRational::one()) * r;
                span.push(index.to_row_truncated(&v), SpanLabel::Multiple { multiplier: m, relation: ri });
            }
        }
        span
    }

    fn push(&mut self, row: SparseRow, label: SpanLabel) {
        self.labels.push(label);
        self.echelon.insert(row);
    }

    /// Adds every monomial of odd weight ≥ k.
    pub fn add_weight_at_least(&mut self, k: u32) {
        let index = self.index.clone();
        for (i, m) in index.monomials().iter().enumerate() {
            if m.weight() >= k {
                let mut row = SparseRow::new();
                row.insert(i, BigRational::one());
                self.push(row, SpanLabel::Monomial(m.clone()));
            }
        }
    }

    /// Inserts `x` (truncated); returns whether it enlarged the span.
    pub fn add_element(&mut self, x: &GrassmannElement, label: SpanLabel) -> bool {
        let before = self.echelon.rank();
        self.push(self.index.to_row_truncated(x), label);
        self.echelon.rank() > before
    }

    pub fn index(&self) -> &Arc<MonomialIndex> {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.echelon.rank()
    }

    pub fn echelon(&self) -> &Echelon {
        &self.echelon
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.echelon.is_pivot(col)
    }

    pub fn contains(&self, x: &GrassmannElement) -> Result<bool> {
        Ok(self.echelon.contains(&self.index.to_row(x)?))
    }

    /// Membership after truncating `x` to the ambient degree.
    pub fn contains_truncated(&self, x: &GrassmannElement) -> bool {
        self.echelon.contains(&self.index.to_row_truncated(x))
    }

    /// The representative of `x` with no pivot monomial.
    pub fn reduce(&self, x: &GrassmannElement) -> Result<GrassmannElement> {
        Ok(self.index.element(&self.echelon.reduce(&self.index.to_row(x)?)))
    }

    pub fn reduce_row(&self, row: &SparseRow) -> SparseRow {
        self.echelon.reduce(row)
    }

    /// `x` as a combination of the labelled spanning vectors, if it is in the span.
    pub fn express(&self, x: &GrassmannElement) -> Result<Option<Vec<(SpanLabel, BigRational)>>> {
        let row = self.index.to_row(x)?;
        Ok(self
            .echelon
            .express(&row)
            .map(|combo| combo.into_iter().map(|(i, c)| (self.labels[i].clone(), c)).collect()))
    }

    /// Monomials outside the pivot set, in ascending total degree.
    pub fn complement(&self) -> Vec<GrassmannElement> {
        (0..self.index.len())
            .rev()
            .filter(|&i| !self.is_pivot(i))
            .map(|i| self.index.monomial_element(i))
            .collect()
    }
}
