//! Leakage emitted by searching the index, and its reduction to the
//! token/string incidence matrix `B` that the attack consumes.
//!
//! A query "retrieves" the nodes its substrings traverse. Prefix pattern
//! leakage records, for each node retrieved by the latest query, which
//! queries retrieved it. Leaf intersection leakage does the same for leaves,
//! with leaf indices hidden behind a random permutation.

use std::collections::{BTreeSet, HashMap};

use rand::seq::SliceRandom;

use crate::bits::BitMatrix;
use crate::error::{Error, Result};
use crate::matrix::IncidenceMatrix;
use crate::seed::{self, Stream};
use crate::sse_sim::key::{CipherId, EncryptedString, Token};
use crate::sse_sim::suffix_tree::{NodeId, SuffixTree};

/// Binary `queries x columns` leakage matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeakageMatrix<L> {
    pub columns: Vec<L>,
    pub bits: BitMatrix,
}

impl<L> LeakageMatrix<L> {
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        (0..self.bits.rows())
            .map(|r| {
                (0..self.bits.cols())
                    .map(|c| u8::from(self.bits.get(r, c)))
                    .collect()
            })
            .collect()
    }
}

/// Leakage of the latest query (`retrieved.last()`): columns are the nodes it
/// retrieved in ascending order, `(i, j) = 1` iff query `i` retrieved node `j`.
pub fn prefix_leakage<L: Ord + Clone>(retrieved: &[BTreeSet<L>]) -> LeakageMatrix<L> {
    let columns: Vec<L> = retrieved
        .last()
        .map(|s| s.iter().cloned().collect())
        .unwrap_or_default();
    fill(retrieved, columns)
}

/// Leaf intersection leakage of the latest query. Its retrieved leaves, in
/// ascending order, are shown through `permutation`: column `k` is leaf
/// `sorted_leaves[permutation[k]]`.
pub fn leaf_leakage<L: Ord + Clone>(
    retrieved: &[BTreeSet<L>],
    permutation: &[usize],
) -> Result<LeakageMatrix<L>> {
    let leaves: Vec<L> = retrieved
        .last()
        .map(|s| s.iter().cloned().collect())
        .unwrap_or_default();
    if !is_permutation(permutation, leaves.len()) {
        return Err(Error::Invalid(format!(
            "leaf permutation is not a bijection on {} leaves",
            leaves.len()
        )));
    }
    let columns = permutation.iter().map(|&k| leaves[k].clone()).collect();
    Ok(fill(retrieved, columns))
}

fn fill<L: Ord + Clone>(retrieved: &[BTreeSet<L>], columns: Vec<L>) -> LeakageMatrix<L> {
    let mut bits = BitMatrix::new(retrieved.len(), columns.len());
    for (i, set) in retrieved.iter().enumerate() {
        for (j, col) in columns.iter().enumerate() {
            if set.contains(col) {
                bits.set(i, j, true);
            }
        }
    }
    LeakageMatrix { columns, bits }
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    p.len() == n && p.iter().copied().collect::<BTreeSet<_>>() == (0..n).collect()
}

/// Internal nodes traversed while searching every suffix of `query`.
pub fn retrieved_prefix_nodes(tree: &SuffixTree, query: &[Token]) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    for start in 0..query.len() {
        if let Some((_, path)) = tree.walk(&query[start..]) {
            out.extend(path.into_iter().filter(|&n| !tree.is_leaf(n)));
        }
    }
    out
}

/// Leaves holding an occurrence of some suffix of `query`.
pub fn retrieved_leaves(tree: &SuffixTree, query: &[Token]) -> BTreeSet<NodeId> {
    let mut out = BTreeSet::new();
    for start in 0..query.len() {
        if let Some(locus) = tree.locate(&query[start..]) {
            out.extend(tree.leaves_below(locus));
        }
    }
    out
}

/// `L1` for the query sequence, relative to the last query.
pub fn emit_prefix_leakage(
    tree: &SuffixTree,
    queries: &[EncryptedString],
) -> LeakageMatrix<NodeId> {
    let retrieved: Vec<_> = queries
        .iter()
        .map(|q| retrieved_prefix_nodes(tree, &q.tokens))
        .collect();
    prefix_leakage(&retrieved)
}

/// `L2` for the query sequence with a seeded leaf permutation. Returns the
/// matrix and the permutation used.
pub fn emit_leaf_leakage(
    tree: &SuffixTree,
    queries: &[EncryptedString],
    seed: u64,
) -> (LeakageMatrix<NodeId>, Vec<usize>) {
    let retrieved: Vec<_> = queries
        .iter()
        .map(|q| retrieved_leaves(tree, &q.tokens))
        .collect();
    let count = retrieved.last().map_or(0, BTreeSet::len);
    let mut permutation: Vec<usize> = (0..count).collect();
    permutation.shuffle(&mut seed::stream_rng(seed, Stream::LeafPermutation));
    let matrix = leaf_leakage(&retrieved, &permutation).expect("shuffle yields a permutation");
    (matrix, permutation)
}

/// Both leakage matrices for self-queries over `strings`.
#[derive(Debug, Clone)]
pub struct LeakageProfile {
    pub prefix_matrix: LeakageMatrix<NodeId>,
    pub leaf_matrix: LeakageMatrix<NodeId>,
    pub leaf_permutation: Vec<usize>,
}

pub fn emit_leakage(tree: &SuffixTree, strings: &[EncryptedString], seed: u64) -> LeakageProfile {
    let prefix_matrix = emit_prefix_leakage(tree, strings);
    let (leaf_matrix, leaf_permutation) = emit_leaf_leakage(tree, strings, seed);
    LeakageProfile {
        prefix_matrix,
        leaf_matrix,
        leaf_permutation,
    }
}

/// The token/encrypted-string incidence matrix `B`: `B[i][j] = 1` iff
/// `strings[j]` contains `universe[i]`.
pub fn reduce_to_incidence(
    strings: &[EncryptedString],
    universe: &[Token],
) -> Result<IncidenceMatrix<Token, CipherId>> {
    let index: HashMap<Token, usize> = universe.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    if index.len() != universe.len() {
        return Err(Error::Invalid("token universe has repeated tokens".into()));
    }
    let columns = strings
        .iter()
        .map(|es| {
            es.tokenset
                .iter()
                .map(|t| {
                    index
                        .get(t)
                        .copied()
                        .ok_or(Error::UnknownToken(u32::from(t.0)))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    IncidenceMatrix::from_column_indices(
        universe.to_vec(),
        strings.iter().map(|es| es.id).collect(),
        &columns,
    )
}

/// `B` read off the index alone: every leaf's first symbol is a token of the
/// string owning that suffix.
pub fn incidence_from_tree(
    tree: &SuffixTree,
    ids: &[CipherId],
    universe: &[Token],
) -> Result<IncidenceMatrix<Token, CipherId>> {
    let col_of: HashMap<CipherId, usize> = ids.iter().enumerate().map(|(j, &id)| (id, j)).collect();
    let row_of: HashMap<Token, usize> = universe.iter().enumerate().map(|(i, &t)| (t, i)).collect();
    let mut columns = vec![BTreeSet::new(); ids.len()];
    for leaf in tree.leaves() {
        let occ = tree.occurrences(leaf)[0];
        let path = tree.path_label(leaf);
        let Some(&first) = path.first() else { continue };
        let &row = row_of
            .get(&first)
            .ok_or(Error::UnknownToken(u32::from(first.0)))?;
        let &col = col_of
            .get(&occ.string)
            .ok_or_else(|| Error::Invalid(format!("leaf cites unknown string {}", occ.string)))?;
        columns[col].insert(row);
    }
    let columns: Vec<Vec<usize>> = columns
        .into_iter()
        .map(|s| s.into_iter().collect())
        .collect();
    IncidenceMatrix::from_column_indices(universe.to_vec(), ids.to_vec(), &columns)
}
