//! Labelled binary incidence matrices and the co-occurrence matrices derived
//! from them.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bits::BitSet;
use crate::error::{Error, Result};

/// Row label of the attacker's extended plaintext matrix `A''`: either a
/// character seen in the known strings, or one of the all-zero placeholder
/// rows standing in for characters the attacker has never seen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CharSlot {
    Known(char),
    Unknown(usize),
}

impl fmt::Display for CharSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CharSlot::Known(c) => write!(f, "{c}"),
            CharSlot::Unknown(i) => write!(f, "?{i}"),
        }
    }
}

/// An `m x n` binary matrix with row and column labels, held in both
/// orientations: rows as bit sets over columns and columns as bit sets over
/// rows.
#[derive(Clone, PartialEq, Eq)]
pub struct IncidenceMatrix<R, C> {
    row_labels: Vec<R>,
    col_labels: Vec<C>,
    rows: Vec<BitSet>,
    cols: Vec<BitSet>,
}

impl<R: Copy + Eq + Hash, C: Copy + Eq + Hash> IncidenceMatrix<R, C> {
    /// `columns[j]` lists the row indices set in column `j`.
    pub fn from_column_indices(
        row_labels: Vec<R>,
        col_labels: Vec<C>,
        columns: &[Vec<usize>],
    ) -> Result<Self> {
        if columns.len() != col_labels.len() {
            return Err(Error::Dimension(format!(
                "{} column labels for {} columns",
                col_labels.len(),
                columns.len()
            )));
        }
        let m = row_labels.len();
        let mut cols = Vec::with_capacity(columns.len());
        for (j, idx) in columns.iter().enumerate() {
            if let Some(&bad) = idx.iter().find(|&&r| r >= m) {
                return Err(Error::Dimension(format!(
                    "column {j} sets row {bad} of {m}"
                )));
            }
            cols.push(BitSet::from_indices(m, idx.iter().copied()));
        }
        Ok(Self::from_columns(row_labels, col_labels, cols))
    }

    pub fn from_columns(row_labels: Vec<R>, col_labels: Vec<C>, cols: Vec<BitSet>) -> Self {
        let m = row_labels.len();
        let n = col_labels.len();
        assert_eq!(cols.len(), n);
        let mut rows = vec![BitSet::new(n); m];
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), m);
            for r in col.iter_ones() {
                rows[r].insert(j);
            }
        }
        Self {
            row_labels,
            col_labels,
            rows,
            cols,
        }
    }

    pub fn rows(&self) -> usize {
        self.row_labels.len()
    }

    pub fn cols(&self) -> usize {
        self.col_labels.len()
    }

    pub fn row_labels(&self) -> &[R] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[C] {
        &self.col_labels
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.cols[c].contains(r)
    }

    pub fn row(&self, r: usize) -> &BitSet {
        &self.rows[r]
    }

    pub fn column(&self, c: usize) -> &BitSet {
        &self.cols[c]
    }

    pub fn columns(&self) -> &[BitSet] {
        &self.cols
    }

    pub fn col_sum(&self, c: usize) -> usize {
        self.cols[c].count_ones()
    }

    pub fn col_sums(&self) -> Vec<usize> {
        self.cols.iter().map(BitSet::count_ones).collect()
    }

    pub fn row_sum(&self, r: usize) -> usize {
        self.rows[r].count_ones()
    }

    pub fn row_index(&self) -> HashMap<R, usize> {
        self.row_labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect()
    }

    pub fn col_index(&self) -> HashMap<C, usize> {
        self.col_labels
            .iter()
            .enumerate()
            .map(|(i, &l)| (l, i))
            .collect()
    }

    /// Relabels and reorders rows: output row `i` is input row `order[i]`.
    pub fn select_rows<R2: Copy + Eq + Hash>(
        &self,
        order: &[usize],
        labels: Vec<R2>,
    ) -> IncidenceMatrix<R2, C> {
        assert_eq!(order.len(), labels.len());
        let cols = self
            .cols
            .iter()
            .map(|col| {
                BitSet::from_indices(
                    order.len(),
                    order
                        .iter()
                        .enumerate()
                        .filter(|(_, &r)| col.contains(r))
                        .map(|(i, _)| i),
                )
            })
            .collect();
        IncidenceMatrix::from_columns(labels, self.col_labels.clone(), cols)
    }

    /// Output column `j` is input column `order[j]`.
    pub fn select_cols(&self, order: &[usize]) -> IncidenceMatrix<R, C> {
        let cols = order.iter().map(|&c| self.cols[c].clone()).collect();
        let labels = order.iter().map(|&c| self.col_labels[c]).collect();
        IncidenceMatrix::from_columns(self.row_labels.clone(), labels, cols)
    }

    /// Dense `rows x cols` 0/1 view, for display and small-instance tests.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.rows())
            .map(|r| (0..self.cols()).map(|c| u8::from(self.get(r, c))).collect())
            .collect()
    }
}

impl<R: fmt::Display, C: fmt::Display> fmt::Debug for IncidenceMatrix<R, C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:>6}", "")?;
        for c in &self.col_labels {
            write!(f, " {c:>4}")?;
        }
        writeln!(f)?;
        for (r, label) in self.row_labels.iter().enumerate() {
            write!(f, "{label:>6}")?;
            for c in 0..self.col_labels.len() {
                write!(f, " {:>4}", u8::from(self.cols[c].contains(r)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Symmetric string-by-string matrix of distinct shared characters (or
/// tokens). Entries are computed on demand from the incidence columns; at
/// 30k strings the dense form would not fit comfortably in memory.
#[derive(Clone)]
pub struct CooccurrenceMatrix<C> {
    labels: Vec<C>,
    cols: Arc<[BitSet]>,
}

impl<C: Copy> CooccurrenceMatrix<C> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[C] {
        &self.labels
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> usize {
        self.cols[i].intersection_count(&self.cols[j])
    }

    pub fn to_dense(&self) -> Vec<Vec<usize>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.get(i, j)).collect())
            .collect()
    }
}

/// `M[i][j]` = number of rows set in both column `i` and column `j`.
pub fn build_cooccurrence<R, C>(matrix: &IncidenceMatrix<R, C>) -> CooccurrenceMatrix<C>
where
    R: Copy + Eq + Hash,
    C: Copy + Eq + Hash,
{
    CooccurrenceMatrix {
        labels: matrix.col_labels.clone(),
        cols: matrix.cols.clone().into(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small() -> IncidenceMatrix<char, usize> {
        // columns: {a,b}, {b,c}, {a,b}
        IncidenceMatrix::from_column_indices(
            vec!['a', 'b', 'c'],
            vec![0, 1, 2],
            &[vec![0, 1], vec![1, 2], vec![0, 1]],
        )
        .unwrap()
    }

    #[test]
    fn orientation_and_sums() {
        let m = small();
        assert_eq!(
            m.to_dense(),
            vec![vec![1, 0, 1], vec![1, 1, 1], vec![0, 1, 0]]
        );
        assert_eq!(m.col_sums(), vec![2, 2, 2]);
        assert_eq!(
            (0..3).map(|r| m.row_sum(r)).collect::<Vec<_>>(),
            vec![2, 3, 1]
        );
    }

    #[test]
    fn out_of_range_rows_are_rejected() {
        let err =
            IncidenceMatrix::<char, usize>::from_column_indices(vec!['a'], vec![0], &[vec![1]]);
        assert!(matches!(err, Err(Error::Dimension(_))));
    }

    #[test]
    fn cooccurrence_examples() {
        let m = small();
        let co = build_cooccurrence(&m);
        // identical columns: count equals both diagonals
        assert_eq!(co.get(0, 2), co.get(0, 0));
        assert_eq!(co.get(0, 2), co.get(2, 2));
        assert_eq!(co.get(0, 1), 1);
        let disjoint = IncidenceMatrix::<char, usize>::from_column_indices(
            vec!['a', 'b'],
            vec![0, 1],
            &[vec![0], vec![1]],
        )
        .unwrap();
        assert_eq!(build_cooccurrence(&disjoint).get(0, 1), 0);
    }

    #[test]
    fn select_reorders() {
        let m = small();
        let cols = m.select_cols(&[1, 0]);
        assert_eq!(cols.col_labels(), &[1, 0]);
        assert_eq!(cols.to_dense(), vec![vec![0, 1], vec![1, 1], vec![1, 0]]);
        let rows = m.select_rows(&[2, 0], vec!['z', 'y']);
        assert_eq!(rows.to_dense(), vec![vec![0, 1, 0], vec![1, 0, 1]]);
    }

    proptest! {
        #[test]
        fn cooccurrence_is_symmetric_and_bounded(
            cols in proptest::collection::vec(proptest::collection::btree_set(0usize..8, 0..8), 1..10)
        ) {
            let idx: Vec<Vec<usize>> = cols.iter().map(|s| s.iter().copied().collect()).collect();
            let m = IncidenceMatrix::<usize, usize>::from_column_indices(
                (0..8).collect(), (0..idx.len()).collect(), &idx).unwrap();
            let co = build_cooccurrence(&m).to_dense();
            for i in 0..idx.len() {
                prop_assert_eq!(co[i][i], cols[i].len());
                for j in 0..idx.len() {
                    prop_assert_eq!(co[i][j], co[j][i]);
                    prop_assert_eq!(co[i][j], cols[i].intersection(&cols[j]).count());
                    prop_assert!(co[i][j] <= co[i][i].min(co[j][j]));
                }
            }
        }
    }
}
