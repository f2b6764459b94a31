//! The five matching steps. Each one only adds pairs it can prove: a sum or
//! bit pattern that is unique on the ciphertext side and has exactly one
//! counterpart on the plaintext side. Ties are skipped, never broken.
//!
//! Throughout, "unmapped" restricts both sides to columns (or rows) that no
//! earlier step has matched. Because every recorded pair is correct, a
//! known string's ciphertext column is always among the unmapped ones while
//! the string itself is unmapped, so the restriction keeps each uniqueness
//! argument intact.

use std::collections::HashMap;

use crate::attack::state::MappingState;
use crate::bits::BitSet;
use crate::corpus::StringId;
use crate::matrix::{CharSlot, CooccurrenceMatrix, IncidenceMatrix};
use crate::sse_sim::{CipherId, Token};

pub type CipherMatrix = IncidenceMatrix<Token, CipherId>;
pub type PlainMatrix = IncidenceMatrix<CharSlot, StringId>;

/// Label-to-index lookups shared by the steps.
struct Index<'a> {
    b: &'a CipherMatrix,
    a2: &'a PlainMatrix,
    b_col: HashMap<CipherId, usize>,
    a_col: HashMap<StringId, usize>,
    b_row: HashMap<Token, usize>,
    a_row: HashMap<CharSlot, usize>,
}

impl<'a> Index<'a> {
    fn new(b: &'a CipherMatrix, a2: &'a PlainMatrix) -> Self {
        Self {
            b,
            a2,
            b_col: b.col_index(),
            a_col: a2.col_index(),
            b_row: b.row_index(),
            a_row: a2.row_index(),
        }
    }

    fn b_col_mapped(&self, state: &MappingState, j: usize) -> bool {
        state.string_of(self.b.col_labels()[j]).is_some()
    }

    fn a_col_mapped(&self, state: &MappingState, j: usize) -> bool {
        state.cipher_of(self.a2.col_labels()[j]).is_some()
    }

    fn b_row_mapped(&self, state: &MappingState, r: usize) -> bool {
        state.char_of(self.b.row_labels()[r]).is_some()
    }

    fn a_row_mapped(&self, state: &MappingState, r: usize) -> bool {
        match self.a2.row_labels()[r] {
            CharSlot::Known(c) => state.token_of(c).is_some(),
            CharSlot::Unknown(_) => false,
        }
    }

    /// Recovered column pairs as `(B column, A'' column)` in ciphertext order.
    fn col_pairs(&self, state: &MappingState) -> Vec<(usize, usize)> {
        state
            .col_map()
            .iter()
            .filter_map(|(es, s)| Some((*self.b_col.get(es)?, *self.a_col.get(s)?)))
            .collect()
    }

    /// Recovered row pairs as `(B row, A'' row)` in token order.
    fn row_pairs(&self, state: &MappingState) -> Vec<(usize, usize)> {
        state
            .row_map()
            .iter()
            .filter_map(|(t, a)| {
                Some((*self.b_row.get(t)?, *self.a_row.get(&CharSlot::Known(*a))?))
            })
            .collect()
    }

    fn map_cols(&self, state: &mut MappingState, bj: usize, aj: usize) -> bool {
        state.insert_string(self.b.col_labels()[bj], self.a2.col_labels()[aj])
    }

    fn map_rows(&self, state: &mut MappingState, br: usize, ar: usize) -> bool {
        match self.a2.row_labels()[ar] {
            CharSlot::Known(c) => state.insert_token(self.b.row_labels()[br], c),
            CharSlot::Unknown(_) => false,
        }
    }
}

fn group_by<K: std::hash::Hash + Eq>(
    items: impl Iterator<Item = (K, usize)>,
) -> HashMap<K, Vec<usize>> {
    let mut groups: HashMap<K, Vec<usize>> = HashMap::new();
    for (key, idx) in items {
        groups.entry(key).or_default().push(idx);
    }
    groups
}

/// Maps every ciphertext column whose sum occurs once among all `n` column
/// sums of `B` and exactly once among the columns of `A''`.
pub fn step1_column_sum(b: &CipherMatrix, a2: &PlainMatrix, state: &mut MappingState) -> usize {
    let ix = Index::new(b, a2);
    let b_sums = b.col_sums();
    let b_groups = group_by(b_sums.iter().copied().zip(0..));
    let a_groups = group_by(a2.col_sums().into_iter().zip(0..));
    let mut added = 0;
    for (k, sum) in b_sums.iter().enumerate() {
        if b_groups[sum].len() != 1 || ix.b_col_mapped(state, k) {
            continue;
        }
        if let Some([j]) = a_groups.get(sum).map(Vec::as_slice) {
            if ix.map_cols(state, k, *j) {
                added += 1;
            }
        }
    }
    added
}

/// For each unmapped known string, keeps the unmapped ciphertexts with the
/// same column sum whose co-occurrence with every recovered pair agrees;
/// a single survivor is a new pair. Repeats until a pass adds nothing.
pub fn step2_occurrence(
    b: &CipherMatrix,
    a2: &PlainMatrix,
    m: &CooccurrenceMatrix<CipherId>,
    m_prime: &CooccurrenceMatrix<StringId>,
    state: &mut MappingState,
) -> usize {
    let ix = Index::new(b, a2);
    let mut added = 0;
    loop {
        let pairs = ix.col_pairs(state);
        let by_sum = group_by(
            (0..b.cols())
                .filter(|&j| !ix.b_col_mapped(state, j))
                .map(|j| (b.col_sum(j), j)),
        );
        let mut found = Vec::new();
        let mut profile = Vec::with_capacity(pairs.len());
        for jp in 0..a2.cols() {
            if ix.a_col_mapped(state, jp) {
                continue;
            }
            let Some(candidates) = by_sum.get(&a2.col_sum(jp)) else {
                continue;
            };
            profile.clear();
            profile.extend(pairs.iter().map(|&(_, ak)| m_prime.get(jp, ak)));
            let mut survivors = candidates.iter().copied().filter(|&j| {
                pairs
                    .iter()
                    .zip(&profile)
                    .all(|(&(bk, _), &want)| m.get(j, bk) == want)
            });
            if let (Some(j), None) = (survivors.next(), survivors.next()) {
                found.push((j, jp));
            }
        }
        let before = added;
        for (j, jp) in found {
            if ix.map_cols(state, j, jp) {
                added += 1;
            }
        }
        if added == before {
            return added;
        }
    }
}

/// Bit pattern of each selected row over the given ordered column list.
fn row_patterns<R, C>(
    matrix: &IncidenceMatrix<R, C>,
    cols: impl Iterator<Item = usize>,
    width: usize,
) -> Vec<BitSet>
where
    R: Copy + Eq + std::hash::Hash,
    C: Copy + Eq + std::hash::Hash,
{
    let mut patterns = vec![BitSet::new(width); matrix.rows()];
    for (q, c) in cols.enumerate() {
        for r in matrix.column(c).iter_ones() {
            patterns[r].insert(q);
        }
    }
    patterns
}

/// Restricts `B` and `A''` to the recovered column pairs (`B_c`, `A''_c`) and
/// maps rows whose non-zero pattern is unique among the unmapped rows on both
/// sides.
pub fn step3_unique_row(b: &CipherMatrix, a2: &PlainMatrix, state: &mut MappingState) -> usize {
    let ix = Index::new(b, a2);
    let pairs = ix.col_pairs(state);
    if pairs.is_empty() {
        return 0;
    }
    let width = pairs.len();
    let b_pat = row_patterns(b, pairs.iter().map(|p| p.0), width);
    let a_pat = row_patterns(a2, pairs.iter().map(|p| p.1), width);

    let b_groups = group_by(
        (0..b.rows())
            .filter(|&r| !ix.b_row_mapped(state, r) && !b_pat[r].is_zero())
            .map(|r| (&b_pat[r], r)),
    );
    let a_groups = group_by(
        (0..a2.rows())
            .filter(|&r| !ix.a_row_mapped(state, r) && !a_pat[r].is_zero())
            .map(|r| (&a_pat[r], r)),
    );
    let mut found = Vec::new();
    for (pattern, rows) in &b_groups {
        if let ([r], Some([ar])) = (rows.as_slice(), a_groups.get(pattern).map(Vec::as_slice)) {
            found.push((*r, *ar));
        }
    }
    found.sort_unstable();
    found
        .into_iter()
        .filter(|&(r, ar)| ix.map_rows(state, r, ar))
        .count()
}

/// Restricts both matrices to the recovered token/character rows (`B_r`,
/// `A''_r`) and maps unmapped columns whose non-zero pattern is unique among
/// the unmapped columns on both sides.
pub fn step4_unique_column(b: &CipherMatrix, a2: &PlainMatrix, state: &mut MappingState) -> usize {
    let ix = Index::new(b, a2);
    let pairs = ix.row_pairs(state);
    if pairs.is_empty() {
        return 0;
    }
    let width = pairs.len();
    let col_pattern = |col: &BitSet, pick: fn(&(usize, usize)) -> usize| {
        BitSet::from_indices(
            width,
            pairs
                .iter()
                .enumerate()
                .filter(|(_, p)| col.contains(pick(p)))
                .map(|(q, _)| q),
        )
    };
    let b_pat: Vec<Option<BitSet>> = (0..b.cols())
        .map(|j| (!ix.b_col_mapped(state, j)).then(|| col_pattern(b.column(j), |p| p.0)))
        .collect();
    let a_pat: Vec<Option<BitSet>> = (0..a2.cols())
        .map(|j| (!ix.a_col_mapped(state, j)).then(|| col_pattern(a2.column(j), |p| p.1)))
        .collect();

    let live = |pats: &[Option<BitSet>]| -> Vec<usize> {
        (0..pats.len())
            .filter(|&j| pats[j].as_ref().is_some_and(|p| !p.is_zero()))
            .collect()
    };
    let b_groups = group_by(
        live(&b_pat)
            .into_iter()
            .map(|j| (b_pat[j].as_ref().unwrap(), j)),
    );
    let a_groups = group_by(
        live(&a_pat)
            .into_iter()
            .map(|j| (a_pat[j].as_ref().unwrap(), j)),
    );

    let mut found = Vec::new();
    for (pattern, cols) in &b_groups {
        if let ([j], Some([jp])) = (cols.as_slice(), a_groups.get(pattern).map(Vec::as_slice)) {
            found.push((*j, *jp));
        }
    }
    found.sort_unstable();
    found
        .into_iter()
        .filter(|&(j, jp)| ix.map_cols(state, j, jp))
        .count()
}

/// Zeroes matched columns (and, when `zero_rows` is set, matched token and
/// character rows), then repeats unique residual-sum matching over the
/// unmapped columns until nothing new is found.
pub fn step5_iterative(
    b: &CipherMatrix,
    a2: &PlainMatrix,
    state: &mut MappingState,
    zero_rows: bool,
) -> usize {
    let ix = Index::new(b, a2);
    let mut b_rows = BitSet::new(b.rows());
    let mut a_rows = BitSet::new(a2.rows());
    if zero_rows {
        for (br, ar) in ix.row_pairs(state) {
            b_rows.insert(br);
            a_rows.insert(ar);
        }
    }
    let b_residual: Vec<usize> = b
        .columns()
        .iter()
        .map(|c| c.difference_count(&b_rows))
        .collect();
    let a_residual: Vec<usize> = a2
        .columns()
        .iter()
        .map(|c| c.difference_count(&a_rows))
        .collect();

    let mut added = 0;
    loop {
        let b_groups = group_by(
            (0..b.cols())
                .filter(|&j| !ix.b_col_mapped(state, j))
                .map(|j| (b_residual[j], j)),
        );
        let a_groups = group_by(
            (0..a2.cols())
                .filter(|&j| !ix.a_col_mapped(state, j))
                .map(|j| (a_residual[j], j)),
        );
        let mut found = Vec::new();
        for (sum, cols) in &b_groups {
            if let ([j], Some([jp])) = (cols.as_slice(), a_groups.get(sum).map(Vec::as_slice)) {
                found.push((*j, *jp));
            }
        }
        found.sort_unstable();
        let new = found
            .into_iter()
            .filter(|&(j, jp)| ix.map_cols(state, j, jp))
            .count();
        if new == 0 {
            return added;
        }
        added += new;
    }
}
