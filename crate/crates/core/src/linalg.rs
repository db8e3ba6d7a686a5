//! Exact sparse row reduction over ℚ.
//!
//! [`Echelon`] keeps a fully reduced row-echelon basis of a growing row space. Rows are
//! sparse maps from column index to coefficient; the pivot of a row is its smallest
//! column, and pivot columns vanish in every other row. Optionally every row remembers
//! which inserted vectors it is a combination of, which yields membership certificates,
//! kernel vectors and matrix inverses without a second pass.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};

pub type SparseRow = BTreeMap<usize, BigRational>;

/// `row += factor * other`
pub fn axpy(row: &mut SparseRow, factor: &BigRational, other: &SparseRow) {
    if factor.is_zero() {
        return;
    }
    for (&c, v) in other {
        let entry = row.entry(c).or_insert_with(BigRational::zero);
        *entry += factor * v;
        if entry.is_zero() {
            row.remove(&c);
        }
    }
}

pub fn scale_row(row: &mut SparseRow, factor: &BigRational) {
    for v in row.values_mut() {
        *v *= factor;
    }
}

#[derive(Clone, Debug)]
struct Row {
    entries: SparseRow,
    combo: SparseRow,
}

/// Outcome of [`Echelon::insert`].
#[derive(Clone, Debug, PartialEq)]
pub enum Insertion {
    /// The vector was independent; its leading column became a new pivot.
    Pivot(usize),
    /// The vector was dependent. With tracking on, the map is a vanishing combination of
    /// inserted vectors (a kernel vector); otherwise it is empty.
    Dependent(SparseRow),
}

#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: BTreeMap<usize, Row>,
    track: bool,
    inserted: usize,
}

impl Echelon {
    pub fn new() -> Self {
        Self::default()
    }

    /// An echelon basis that records, per row, the combination of inserted vectors it
    /// came from. Inserted vectors are numbered in insertion order.
    pub fn tracking() -> Self {
        Echelon { track: true, ..Self::default() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.keys().copied()
    }

    pub fn is_pivot(&self, col: usize) -> bool {
        self.rows.contains_key(&col)
    }

    /// Rows in pivot order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, &SparseRow)> {
        self.rows.iter().map(|(&p, r)| (p, &r.entries))
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    /// Reduces `v` modulo the row space; the result has no entry in any pivot column.
    pub fn reduce(&self, v: &SparseRow) -> SparseRow {
        self.reduce_tracked(v.clone(), SparseRow::new()).0
    }

    fn reduce_tracked(&self, mut v: SparseRow, mut combo: SparseRow) -> (SparseRow, SparseRow) {
        let hits: Vec<(usize, BigRational)> = v
            .iter()
            .filter(|(c, _)| self.rows.contains_key(c))
            .map(|(&c, x)| (c, x.clone()))
            .collect();
        for (c, x) in hits {
            let row = &self.rows[&c];
            let f = -x;
            axpy(&mut v, &f, &row.entries);
            if self.track {
                axpy(&mut combo, &f, &row.combo);
            }
        }
        (v, combo)
    }

    pub fn contains(&self, v: &SparseRow) -> bool {
        self.reduce(v).is_empty()
    }

    /// With tracking on: coefficients `c_i` such that `v = Σ c_i · inserted_i`, if `v`
    /// lies in the row space.
    pub fn express(&self, v: &SparseRow) -> Option<SparseRow> {
        assert!(self.track, "express needs a tracking echelon basis");
        let (rest, combo) = self.reduce_tracked(v.clone(), SparseRow::new());
        if rest.is_empty() {
            // v - Σ(...) = 0 was accumulated with negative sign
            Some(combo.into_iter().map(|(k, c)| (k, -c)).collect())
        } else {
            None
        }
    }

    pub fn insert(&mut self, v: SparseRow) -> Insertion {
        let id = self.inserted;
        self.inserted += 1;
        let mut combo = SparseRow::new();
        if self.track {
            combo.insert(id, BigRational::one());
        }
        let (mut v, mut combo) = self.reduce_tracked(v, combo);
        let Some((&pivot, lead)) = v.iter().next() else {
            return Insertion::Dependent(combo);
        };
        let inv = BigRational::one() / lead;
        scale_row(&mut v, &inv);
        if self.track {
            scale_row(&mut combo, &inv);
        }
        for row in self.rows.values_mut() {
            if let Some(x) = row.entries.get(&pivot).cloned() {
                let f = -x;
                axpy(&mut row.entries, &f, &v);
                if self.track {
                    axpy(&mut row.combo, &f, &combo);
                }
            }
        }
        self.rows.insert(pivot, Row { entries: v, combo });
        Insertion::Pivot(pivot)
    }
}

/// Solves `Σ_j a_ij x_j = b_i` exactly. Returns the solution with every free variable
/// set to zero, or `None` when the system is inconsistent.
pub fn solve(equations: &[(SparseRow, BigRational)], nvars: usize) -> Option<Vec<BigRational>> {
    let mut ech = Echelon::new();
    for (lhs, rhs) in equations {
        debug_assert!(lhs.keys().all(|&c| c < nvars));
        let mut row = lhs.clone();
        if !rhs.is_zero() {
            row.insert(nvars, rhs.clone());
        }
        if let Insertion::Pivot(p) = ech.insert(row) {
            if p == nvars {
                return None;
            }
        }
    }
    let mut x = vec![BigRational::zero(); nvars];
    for (p, row) in ech.rows() {
        x[p] = row.get(&nvars).cloned().unwrap_or_else(BigRational::zero);
    }
    Some(x)
}

/// Inverse of a dense square matrix, `None` if singular.
pub fn invert(matrix: &[Vec<BigRational>]) -> Option<Vec<Vec<BigRational>>> {
    let n = matrix.len();
    let mut ech = Echelon::tracking();
    for row in matrix {
        assert_eq!(row.len(), n, "matrix must be square");
        let sparse: SparseRow = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (j, v.clone()))
            .collect();
        if let Insertion::Dependent(_) = ech.insert(sparse) {
            return None;
        }
    }
    // the reduced rows are the unit vectors; their combinations are the inverse rows
    let mut inv = vec![vec![BigRational::zero(); n]; n];
    for (p, row) in ech.rows.iter() {
        for (&j, v) in &row.combo {
            inv[*p][j] = v.clone();
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeff::{rat, rat_int};

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(c, v)| (c, rat_int(v))).collect()
    }

    #[test]
    fn rref_invariant_holds() {
        let mut e = Echelon::new();
        e.insert(row(&[(0, 2), (1, 4), (3, 2)]));
        e.insert(row(&[(1, 1), (2, 1)]));
        e.insert(row(&[(0, 1), (2, 5)]));
        let pivots: Vec<_> = e.pivots().collect();
        assert!(pivots.windows(2).all(|w| w[0] < w[1]));
        for (p, r) in e.rows() {
            assert_eq!(r.get(&p), Some(&rat_int(1)));
            for q in e.pivots().filter(|&q| q != p) {
                assert!(!r.contains_key(&q));
            }
        }
    }

    #[test]
    fn dependent_vectors_give_kernel_vectors() {
        let mut e = Echelon::tracking();
        let vs = [row(&[(0, 1), (1, 1)]), row(&[(1, 1), (2, 1)]), row(&[(0, 1), (2, -1)])];
        let mut last = None;
        for v in vs.iter().cloned() {
            last = Some(e.insert(v));
        }
        let Some(Insertion::Dependent(k)) = last else { panic!("third vector is dependent") };
        // k0 v0 + k1 v1 + k2 v2 = 0
        let mut acc = SparseRow::new();
        for (&i, c) in &k {
            axpy(&mut acc, c, &vs[i]);
        }
        assert!(acc.is_empty());
        assert_eq!(k.len(), 3);
    }

    #[test]
    fn express_reconstructs_members() {
        let mut e = Echelon::tracking();
        let vs = [row(&[(0, 1), (2, 3)]), row(&[(1, 2)])];
        for v in vs.iter().cloned() {
            e.insert(v);
        }
        let target = row(&[(0, 2), (1, 4), (2, 6)]);
        let combo = e.express(&target).unwrap();
        let mut acc = SparseRow::new();
        for (&i, c) in &combo {
            axpy(&mut acc, c, &vs[i]);
        }
        assert_eq!(acc, target);
        assert!(e.express(&row(&[(3, 1)])).is_none());
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        // x + y = 3, x - y = 1
        let eqs = vec![(row(&[(0, 1), (1, 1)]), rat_int(3)), (row(&[(0, 1), (1, -1)]), rat_int(1))];
        assert_eq!(solve(&eqs, 2), Some(vec![rat_int(2), rat_int(1)]));
        let bad = vec![(row(&[(0, 1)]), rat_int(1)), (row(&[(0, 2)]), rat_int(3))];
        assert_eq!(solve(&bad, 1), None);
    }

    #[test]
    fn inverse_of_two_by_two() {
        let m = vec![vec![rat_int(2), rat_int(1)], vec![rat_int(1), rat_int(1)]];
        let inv = invert(&m).unwrap();
        assert_eq!(inv, vec![vec![rat_int(1), rat_int(-1)], vec![rat_int(-1), rat_int(2)]]);
        let sing = vec![vec![rat_int(1), rat(1, 2)], vec![rat_int(2), rat_int(1)]];
        assert!(invert(&sing).is_none());
    }
}
