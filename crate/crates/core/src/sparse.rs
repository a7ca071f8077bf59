//! Sparse exact linear algebra over Q.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{GkzError, Result};
use crate::rational::{self, Q};

pub type SparseVec = BTreeMap<usize, Q>;

/// `v += c·w`, dropping cancelled entries.
pub fn axpy(v: &mut SparseVec, c: &Q, w: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (k, x) in w {
        let e = v.entry(*k).or_insert_with(Q::zero);
        *e += c * x;
        if e.is_zero() {
            v.remove(k);
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseRationalMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Q>,
}

impl SparseRationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseRationalMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Q::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<Q>], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let q: Vec<Vec<Q>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| rational::int(x)).collect())
            .collect();
        Self::from_dense(&q, cols)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> Q {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(Q::zero)
    }

    pub fn set(&mut self, r: usize, c: usize, x: Q) {
        assert!(r < self.rows && c < self.cols, "index ({r},{c}) out of range");
        if x.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), x);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, x: &Q) {
        let v = self.get(r, c) + x;
        self.set(r, c, v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &Q)> {
        self.entries.iter().map(|(&(r, c), x)| (r, c, x))
    }

    pub fn columns(&self) -> Vec<SparseVec> {
        let mut cols = vec![SparseVec::new(); self.cols];
        for (r, c, x) in self.entries() {
            cols[c].insert(r, x.clone());
        }
        cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, x) in self.entries() {
            t.entries.insert((c, r), x.clone());
        }
        t
    }

    pub fn mul(&self, other: &SparseRationalMatrix) -> Result<SparseRationalMatrix> {
        if self.cols != other.rows {
            return Err(GkzError::ShapeMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &Q)>> = BTreeMap::new();
        for (r, c, x) in other.entries() {
            by_row.entry(r).or_default().push((c, x));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (i, k, x) in self.entries() {
            if let Some(row) = by_row.get(&k) {
                for (j, y) in row {
                    out.add_to(i, *j, &(x * *y));
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (r, c, x) in self.entries() {
            if let Some(y) = v.get(&c) {
                axpy(&mut out, &(x * y), &SparseVec::from([(r, Q::one())]));
            }
        }
        out
    }

    /// Rank and a kernel basis, by elimination on the columns with a
    /// Markowitz-style pivot (the candidate in the sparsest row).
    pub fn rank_and_kernel_basis(&self) -> (usize, Vec<SparseVec>) {
        let mut row_count = vec![0usize; self.rows];
        for (r, _, _) in self.entries() {
            row_count[r] += 1;
        }
        let mut ech = Echelon::new();
        let mut kernel = Vec::new();
        for (j, col) in self.columns().into_iter().enumerate() {
            let rule = |v: &SparseVec| {
                *v.keys()
                    .min_by_key(|&&r| (row_count[r], r))
                    .expect("nonzero vector")
            };
            if let Some(relation) = ech.insert_with(col, Some(j), rule) {
                kernel.push(relation);
            }
        }
        (ech.rank(), kernel)
    }

    /// (rank, kernel dimension); the two sum to the number of columns.
    pub fn rank_and_kernel(&self) -> (usize, usize) {
        let (r, k) = self.rank_and_kernel_basis();
        (r, k.len())
    }

    pub fn rank(&self) -> usize {
        self.rank_and_kernel().0
    }
}

impl Serialize for SparseRationalMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let triplets: Vec<(usize, usize, String)> = self
            .entries()
            .map(|(r, c, x)| (r, c, rational::format(x)))
            .collect();
        let mut st = s.serialize_struct("SparseRationalMatrix", 3)?;
        st.serialize_field("rows", &self.rows)?;
        st.serialize_field("cols", &self.cols)?;
        st.serialize_field("entries", &triplets)?;
        st.end()
    }
}

#[derive(Clone, Debug)]
struct EchelonRow {
    pivot: usize,
    row: SparseVec,
    combo: SparseVec,
}

/// Incremental row echelon form that remembers how each stored row was
/// built from the labelled input vectors.
///
/// Rows are reduced in insertion order: a row stored later has a zero in
/// every earlier pivot column, so any pivot rule gives a correct reduction.
#[derive(Clone, Debug, Default)]
pub struct Echelon {
    rows: Vec<EchelonRow>,
}

impl Echelon {
    pub fn new() -> Self {
        Echelon::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.rows.iter().map(|r| r.pivot)
    }

    /// Reduces `v`, returning the residual and the coefficients `x` over
    /// the labels with `v = residual + Σ x_l · input_l`.
    pub fn reduce(&self, v: &SparseVec) -> (SparseVec, SparseVec) {
        let mut v = v.clone();
        let mut coords = SparseVec::new();
        for r in &self.rows {
            if let Some(c) = v.get(&r.pivot).cloned() {
                axpy(&mut v, &-c.clone(), &r.row);
                axpy(&mut coords, &c, &r.combo);
            }
        }
        (v, coords)
    }

    pub fn contains(&self, v: &SparseVec) -> bool {
        self.reduce(v).0.is_empty()
    }

    /// Inserts with the smallest surviving index as pivot.
    pub fn insert(&mut self, v: SparseVec, label: Option<usize>) -> Option<SparseVec> {
        self.insert_with(v, label, |r| *r.keys().next().unwrap())
    }

    /// Inserts `v` (tagged with `label`). Returns `None` if it was independent
    /// and stored, or `Some(relation)` among labels if it reduced to zero.
    pub fn insert_with(
        &mut self,
        v: SparseVec,
        label: Option<usize>,
        pivot_rule: impl Fn(&SparseVec) -> usize,
    ) -> Option<SparseVec> {
        let (residual, coords) = self.reduce(&v);
        let mut combo = SparseVec::new();
        if let Some(l) = label {
            combo.insert(l, Q::one());
        }
        axpy(&mut combo, &-Q::one(), &coords);
        if residual.is_empty() {
            return Some(combo);
        }
        let pivot = pivot_rule(&residual);
        let inv = Q::one() / &residual[&pivot];
        let scale = |m: SparseVec| -> SparseVec { m.into_iter().map(|(k, x)| (k, x * &inv)).collect() };
        self.rows.push(EchelonRow {
            pivot,
            row: scale(residual),
            combo: scale(combo),
        });
        None
    }
}

/// Greedy complement: indices `0..dim` (in the given preference order) that
/// extend the span of `vectors` to the whole space, plus the echelon form.
pub fn complement_basis(
    vectors: impl IntoIterator<Item = SparseVec>,
    dim: usize,
    preference: impl IntoIterator<Item = usize>,
) -> Vec<usize> {
    let mut ech = Echelon::new();
    for v in vectors {
        ech.insert(v, None);
    }
    let mut chosen = Vec::new();
    for i in preference {
        if ech.rank() == dim {
            break;
        }
        if ech.insert(SparseVec::from([(i, Q::one())]), None).is_none() {
            chosen.push(i);
        }
    }
    chosen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn rank_examples() {
        assert_eq!(SparseRationalMatrix::zeros(0, 0).rank_and_kernel(), (0, 0));
        assert_eq!(SparseRationalMatrix::identity(3).rank_and_kernel(), (3, 0));
        let m = SparseRationalMatrix::from_i64(&[vec![1, 2], vec![2, 4]]);
        assert_eq!(m.rank_and_kernel(), (1, 1));
        let (_, k) = m.rank_and_kernel_basis();
        assert!(m.apply(&k[0]).is_empty());
    }

    #[test]
    fn kernel_vectors_are_killed() {
        let m = SparseRationalMatrix::from_i64(&[
            vec![1, 0, 2, -1, 3],
            vec![0, 1, 1, 1, 0],
            vec![1, 1, 3, 0, 3],
        ]);
        let (r, k) = m.rank_and_kernel_basis();
        assert_eq!(r, 2);
        assert_eq!(k.len(), 3);
        for v in &k {
            assert!(m.apply(v).is_empty());
        }
    }

    #[test]
    fn product_and_json() {
        let a = SparseRationalMatrix::from_i64(&[vec![1, 1], vec![0, 1]]);
        let b = SparseRationalMatrix::from_i64(&[vec![1, -1], vec![0, 1]]);
        assert_eq!(a.mul(&b).unwrap(), SparseRationalMatrix::identity(2));
        assert!(a.mul(&SparseRationalMatrix::zeros(3, 1)).is_err());
        let mut m = SparseRationalMatrix::zeros(1, 2);
        m.set(0, 1, crate::rational::ratio(-1, 2));
        assert_eq!(
            serde_json::to_string(&m).unwrap(),
            r#"{"rows":1,"cols":2,"entries":[[0,1,"-1/2"]]}"#
        );
    }

    #[test]
    fn echelon_tracks_combinations() {
        let mut e = Echelon::new();
        let v0 = SparseVec::from([(0, int(1)), (1, int(1))]);
        let v1 = SparseVec::from([(1, int(2)), (2, int(1))]);
        assert!(e.insert(v0, Some(0)).is_none());
        assert!(e.insert(v1, Some(1)).is_none());
        let target = SparseVec::from([(0, int(3)), (1, int(1)), (2, int(-1))]);
        let (res, coords) = e.reduce(&target);
        assert!(res.is_empty());
        assert_eq!(coords, SparseVec::from([(0, int(3)), (1, int(-1))]));
        let dep = SparseVec::from([(0, int(2)), (1, int(4)), (2, int(1))]);
        let rel = e.insert(dep, Some(2)).unwrap();
        assert_eq!(rel, SparseVec::from([(0, int(-2)), (1, int(-1)), (2, int(1))]));
    }

    #[test]
    fn complement_prefers_order() {
        let image = [SparseVec::from([(0, int(-1)), (1, int(1))])];
        assert_eq!(complement_basis(image.clone(), 2, [1, 0]), vec![1]);
        assert_eq!(complement_basis(image, 2, [0, 1]), vec![0]);
    }
}
