//! Matrix attack on the reduced leakage under a partially known dataset.
//!
//! Inputs are the ciphertext incidence matrix `B` (tokens x encrypted
//! strings), the attacker's plaintext matrix `A'` over known strings and
//! their characters, its zero-row extension `A''` to `m` rows, and the two
//! co-occurrence matrices `M` (from `B`) and `M'` (from `A''`).
//!
//! [`run_attack`] applies unique column-sum matching once and then cycles
//! occurrence matching, unique-row matching, unique-column matching and
//! residual-sum matching until a full round adds nothing.

pub mod state;
pub mod steps;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, KnowledgeSplit, StringId};
use crate::error::{Error, Result};
use crate::matrix::{CharSlot, CooccurrenceMatrix, IncidenceMatrix};
use crate::sse_sim::CipherId;

pub use state::{GroundTruth, MappingState};
pub use steps::{
    step1_column_sum, step2_occurrence, step3_unique_row, step4_unique_column, step5_iterative,
    CipherMatrix, PlainMatrix,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AttackConfig {
    pub max_rounds: usize,
    /// Zero matched token/character rows as well as matched columns before
    /// recomputing residual sums.
    pub zero_matched_rows_in_step5: bool,
}

impl Default for AttackConfig {
    fn default() -> Self {
        Self {
            max_rounds: 100,
            zero_matched_rows_in_step5: true,
        }
    }
}

/// The attacker's known-string matrix `A'`: rows are the known characters in
/// sorted order, columns the known strings in id order.
pub fn build_a_prime(corpus: &Corpus, split: &KnowledgeSplit) -> IncidenceMatrix<char, StringId> {
    let row_of = |c: char| {
        split
            .known_alphabet
            .binary_search(&c)
            .expect("known alphabet is closed")
    };
    let columns: Vec<Vec<usize>> = split
        .known_ids
        .iter()
        .map(|&id| corpus.get(id).charset.iter().map(|&c| row_of(c)).collect())
        .collect();
    IncidenceMatrix::from_column_indices(
        split.known_alphabet.clone(),
        split.known_ids.clone(),
        &columns,
    )
    .expect("rows come from the known alphabet")
}

/// Pads `A'` with all-zero rows up to `m` rows. The padding rows are labelled
/// [`CharSlot::Unknown`].
pub fn build_a_double_prime(
    a_prime: &IncidenceMatrix<char, StringId>,
    m: usize,
) -> Result<IncidenceMatrix<CharSlot, StringId>> {
    let found = a_prime.rows();
    if m < found {
        return Err(Error::ExtensionTarget { found, target: m });
    }
    let labels = a_prime
        .row_labels()
        .iter()
        .map(|&c| CharSlot::Known(c))
        .chain((0..m - found).map(CharSlot::Unknown))
        .collect();
    let columns: Vec<Vec<usize>> = a_prime
        .columns()
        .iter()
        .map(|c| c.iter_ones().collect())
        .collect();
    IncidenceMatrix::from_column_indices(labels, a_prime.col_labels().to_vec(), &columns)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Step {
    ColumnSum,
    Occurrence,
    UniqueRow,
    UniqueColumn,
    Iterative,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Step::ColumnSum => "column-sum",
            Step::Occurrence => "occurrence",
            Step::UniqueRow => "unique-row",
            Step::UniqueColumn => "unique-column",
            Step::Iterative => "iterative",
        })
    }
}

/// Map sizes after one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepSnapshot {
    pub round: usize,
    pub step: Step,
    pub strings: usize,
    pub tokens: usize,
}

#[derive(Debug, Clone)]
pub struct AttackOutcome {
    pub state: MappingState,
    pub trace: Vec<StepSnapshot>,
    /// Rounds of steps 2-5 executed.
    pub rounds: usize,
}

pub fn run_attack(
    b: &CipherMatrix,
    a2: &PlainMatrix,
    m: &CooccurrenceMatrix<CipherId>,
    m_prime: &CooccurrenceMatrix<StringId>,
    cfg: &AttackConfig,
) -> Result<MappingState> {
    run_attack_from(b, a2, m, m_prime, cfg, MappingState::new()).map(|o| o.state)
}

/// Runs the attack starting from an existing state (for example one carrying
/// ground truth, or hints), recording map sizes after every step.
pub fn run_attack_from(
    b: &CipherMatrix,
    a2: &PlainMatrix,
    m: &CooccurrenceMatrix<CipherId>,
    m_prime: &CooccurrenceMatrix<StringId>,
    cfg: &AttackConfig,
    mut state: MappingState,
) -> Result<AttackOutcome> {
    check_dimensions(b, a2, m, m_prime)?;
    if cfg.max_rounds == 0 {
        return Err(Error::Invalid("max_rounds must be at least 1".into()));
    }
    let mut trace = Vec::new();
    let snap = |state: &MappingState, round, step| StepSnapshot {
        round,
        step,
        strings: state.strings_mapped(),
        tokens: state.tokens_mapped(),
    };

    step1_column_sum(b, a2, &mut state);
    trace.push(snap(&state, 0, Step::ColumnSum));

    let mut rounds = 0;
    while rounds < cfg.max_rounds {
        rounds += 1;
        let before = (state.strings_mapped(), state.tokens_mapped());
        step2_occurrence(b, a2, m, m_prime, &mut state);
        trace.push(snap(&state, rounds, Step::Occurrence));
        step3_unique_row(b, a2, &mut state);
        trace.push(snap(&state, rounds, Step::UniqueRow));
        step4_unique_column(b, a2, &mut state);
        trace.push(snap(&state, rounds, Step::UniqueColumn));
        step5_iterative(b, a2, &mut state, cfg.zero_matched_rows_in_step5);
        trace.push(snap(&state, rounds, Step::Iterative));
        log::debug!(
            "round {rounds}: {} strings, {} tokens",
            state.strings_mapped(),
            state.tokens_mapped()
        );
        if (state.strings_mapped(), state.tokens_mapped()) == before {
            break;
        }
    }
    Ok(AttackOutcome {
        state,
        trace,
        rounds,
    })
}

fn check_dimensions(
    b: &CipherMatrix,
    a2: &PlainMatrix,
    m: &CooccurrenceMatrix<CipherId>,
    m_prime: &CooccurrenceMatrix<StringId>,
) -> Result<()> {
    if b.rows() != a2.rows() {
        return Err(Error::Dimension(format!(
            "B has {} rows but A'' has {}",
            b.rows(),
            a2.rows()
        )));
    }
    if a2.cols() > b.cols() {
        return Err(Error::Dimension(format!(
            "{} known strings but only {} ciphertexts",
            a2.cols(),
            b.cols()
        )));
    }
    if m.labels() != b.col_labels() {
        return Err(Error::Dimension(
            "M is not indexed like the columns of B".into(),
        ));
    }
    if m_prime.labels() != a2.col_labels() {
        return Err(Error::Dimension(
            "M' is not indexed like the columns of A''".into(),
        ));
    }
    Ok(())
}
