//! Sparse square matrices and sparse coordinate vectors over ℚ(z).

use std::collections::BTreeMap;
use std::fmt;

use crate::qfield::QScalar;

/// Sparse coordinate vector: index → nonzero coefficient.
pub type SparseVec = BTreeMap<usize, QScalar>;

/// Add `c * v` into `out`, dropping entries that cancel.
pub fn axpy(out: &mut SparseVec, c: &QScalar, v: &SparseVec) {
    if c.is_zero() {
        return;
    }
    for (i, x) in v {
        let e = out.entry(*i).or_default();
        *e += &(c * x);
        if e.is_zero() {
            out.remove(i);
        }
    }
}

/// Square sparse matrix stored by columns. Column j holds the coordinates of
/// the image of basis vector j; zero entries are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseMatrix {
    cols: Vec<SparseVec>,
}

impl SparseMatrix {
    /// The zero matrix of size `dim`.
    pub fn zeros(dim: usize) -> Self {
        SparseMatrix {
            cols: vec![SparseVec::new(); dim],
        }
    }

    /// The identity matrix of size `dim`.
    pub fn identity(dim: usize) -> Self {
        Self::diagonal((0..dim).map(|_| QScalar::one()))
    }

    /// Diagonal matrix with the given entries.
    pub fn diagonal(entries: impl IntoIterator<Item = QScalar>) -> Self {
        let mut m = SparseMatrix::default();
        for (i, d) in entries.into_iter().enumerate() {
            let mut col = SparseVec::new();
            if !d.is_zero() {
                col.insert(i, d);
            }
            m.cols.push(col);
        }
        m
    }

    /// Build from columns.
    pub fn from_columns(cols: Vec<SparseVec>) -> Self {
        let cols = cols
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMatrix { cols }
    }

    /// Matrix size.
    pub fn dim(&self) -> usize {
        self.cols.len()
    }

    /// Entry (row, col).
    pub fn get(&self, row: usize, col: usize) -> QScalar {
        self.cols[col].get(&row).cloned().unwrap_or_default()
    }

    /// Set entry (row, col); zero removes it.
    pub fn set(&mut self, row: usize, col: usize, v: QScalar) {
        if v.is_zero() {
            self.cols[col].remove(&row);
        } else {
            self.cols[col].insert(row, v);
        }
    }

    /// Add `v` to entry (row, col).
    pub fn add_to(&mut self, row: usize, col: usize, v: &QScalar) {
        let cur = self.get(row, col);
        self.set(row, col, cur + v);
    }

    /// Nonzero entries of column `col` in row order.
    pub fn column(&self, col: usize) -> &SparseVec {
        &self.cols[col]
    }

    /// All nonzero entries ordered by (row, col).
    pub fn entries(&self) -> Vec<(usize, usize, QScalar)> {
        let mut out: Vec<_> = self
            .cols
            .iter()
            .enumerate()
            .flat_map(|(j, c)| c.iter().map(move |(i, v)| (*i, j, v.clone())))
            .collect();
        out.sort_by_key(|(i, j, _)| (*i, *j));
        out
    }

    /// Number of stored entries.
    pub fn nnz(&self) -> usize {
        self.cols.iter().map(|c| c.len()).sum()
    }

    /// True when every entry is zero.
    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.is_empty())
    }

    /// True when all entries lie on the diagonal.
    pub fn is_diagonal(&self) -> bool {
        self.cols
            .iter()
            .enumerate()
            .all(|(j, c)| c.keys().all(|i| *i == j))
    }

    /// Matrix times vector.
    pub fn apply(&self, v: &SparseVec) -> SparseVec {
        let mut out = SparseVec::new();
        for (j, c) in v {
            axpy(&mut out, c, &self.cols[*j]);
        }
        out
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMatrix) -> SparseMatrix {
        SparseMatrix {
            cols: rhs.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    /// Linear combination Σ c_k M_k of same-sized matrices.
    pub fn combination(terms: &[(QScalar, &SparseMatrix)]) -> SparseMatrix {
        let dim = terms.first().map_or(0, |(_, m)| m.dim());
        let mut out = SparseMatrix::zeros(dim);
        for (c, m) in terms {
            for (j, col) in m.cols.iter().enumerate() {
                axpy(&mut out.cols[j], c, col);
            }
        }
        out
    }

    /// Scalar multiple.
    pub fn scaled(&self, c: &QScalar) -> SparseMatrix {
        SparseMatrix::combination(&[(c.clone(), self)])
    }

    /// Apply `f` to every stored entry (zero results are dropped).
    pub fn map_entries(&self, f: impl Fn(&QScalar) -> QScalar) -> SparseMatrix {
        SparseMatrix::from_columns(
            self.cols
                .iter()
                .map(|c| c.iter().map(|(i, v)| (*i, f(v))).collect())
                .collect(),
        )
    }

    /// First (row, col) in (row, col) order where the matrices differ.
    pub fn first_difference(&self, other: &SparseMatrix) -> Option<(usize, usize)> {
        let d = SparseMatrix::combination(&[(QScalar::one(), self), (-QScalar::one(), other)]);
        d.entries().first().map(|(i, j, _)| (*i, *j))
    }

    /// Restrict to the given rows and columns (both in the given order).
    pub fn submatrix(&self, keep: &[usize]) -> SparseMatrix {
        let pos: BTreeMap<usize, usize> = keep.iter().enumerate().map(|(k, i)| (*i, k)).collect();
        SparseMatrix {
            cols: keep
                .iter()
                .map(|j| {
                    self.cols[*j]
                        .iter()
                        .filter_map(|(i, v)| pos.get(i).map(|k| (*k, v.clone())))
                        .collect()
                })
                .collect(),
        }
    }
}

impl fmt::Display for SparseMatrix {
    /// One `(row, col) value` line per nonzero entry.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, j, v) in self.entries() {
            writeln!(f, "({i}, {j}) {v}")?;
        }
        Ok(())
    }
}

/// Solve `Σ_k x_k cols[k] = rhs` exactly for vectors of equal length.
/// Returns `None` when the system is inconsistent or the columns are
/// linearly dependent.
pub fn solve(cols: &[Vec<QScalar>], rhs: &[QScalar]) -> Option<Vec<QScalar>> {
    let rows = rhs.len();
    let k = cols.len();
    let mut a: Vec<Vec<QScalar>> = (0..rows)
        .map(|i| {
            let mut r: Vec<QScalar> = cols.iter().map(|c| c[i].clone()).collect();
            r.push(rhs[i].clone());
            r
        })
        .collect();
    let mut pivot_row = 0;
    for col in 0..k {
        let p = (pivot_row..rows).find(|&r| !a[r][col].is_zero())?;
        a.swap(pivot_row, p);
        let inv = a[pivot_row][col].inv().expect("nonzero pivot");
        for x in a[pivot_row].iter_mut() {
            *x = &*x * &inv;
        }
        let prow = a[pivot_row].clone();
        for (r, row) in a.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&prow) {
                    *x -= &(&f * y);
                }
            }
        }
        pivot_row += 1;
    }
    if a[pivot_row..].iter().any(|r| !r[k].is_zero()) {
        return None;
    }
    Some((0..k).map(|i| a[i][k].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> QScalar {
        QScalar::from_int(n)
    }

    #[test]
    fn product_and_identity() {
        let mut m = SparseMatrix::zeros(2);
        m.set(0, 1, QScalar::q());
        m.set(1, 0, s(2));
        let id = SparseMatrix::identity(2);
        assert_eq!(m.mul(&id), m);
        let m2 = m.mul(&m);
        assert!(m2.is_diagonal());
        assert_eq!(m2.get(0, 0), QScalar::q() * s(2));
    }

    #[test]
    fn first_difference_is_row_major() {
        let a = SparseMatrix::zeros(3);
        let mut b = SparseMatrix::zeros(3);
        b.set(2, 0, s(1));
        b.set(1, 2, s(1));
        assert_eq!(a.first_difference(&b), Some((1, 2)));
        assert_eq!(a.first_difference(&a), None);
    }

    #[test]
    fn solve_two_by_two() {
        let cols = vec![vec![s(1), s(1)], vec![s(1), s(-1)]];
        let x = solve(&cols, &[s(3), s(1)]).unwrap();
        assert_eq!(x, vec![s(2), s(1)]);
        assert!(solve(&[vec![s(1), s(0)]], &[s(0), s(1)]).is_none());
    }

    #[test]
    fn submatrix_keeps_order() {
        let mut m = SparseMatrix::zeros(3);
        m.set(2, 0, s(5));
        m.set(1, 1, s(7));
        let sub = m.submatrix(&[0, 2]);
        assert_eq!(sub.get(1, 0), s(5));
        assert_eq!(sub.nnz(), 1);
    }
}
