use serde::{Deserialize, Serialize};

use crate::attack::MappingState;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::sse_sim::TokenAlphabet;

/// Recovery rates for one trial, or the mean over several (`trials > 1`, in
/// which case counts are means too).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub knowledge_ratio: f64,
    /// `n`.
    pub strings_total: usize,
    /// `m`.
    pub alphabet_total: usize,
    pub known_strings: f64,
    /// Correct `(t, a)` pairs.
    pub alphabet_count: f64,
    pub alphabet_rate: f64,
    /// Encrypted strings whose plaintext the attacker holds: matched to a
    /// known string, or fully decryptable through recovered tokens.
    pub string_count: f64,
    pub string_rate: f64,
    /// Encrypted strings all of whose distinct tokens are recovered.
    pub initial_path_count: f64,
    pub initial_path_rate: f64,
    /// Correct `(es, s)` pairs.
    pub mapped_string_count: f64,
    pub mapped_string_rate: f64,
    /// Wrong pairs of either kind.
    pub false_positives: f64,
    pub trials: usize,
}

impl RecoveryReport {
    pub fn with_knowledge(mut self, ratio: f64) -> Self {
        self.knowledge_ratio = ratio;
        self
    }

    /// Arithmetic mean, in the order given.
    pub fn mean(reports: &[RecoveryReport]) -> Option<RecoveryReport> {
        let first = reports.first()?;
        let k = reports.len() as f64;
        let avg = |f: fn(&RecoveryReport) -> f64| reports.iter().map(f).sum::<f64>() / k;
        Some(RecoveryReport {
            knowledge_ratio: first.knowledge_ratio,
            strings_total: first.strings_total,
            alphabet_total: first.alphabet_total,
            known_strings: avg(|r| r.known_strings),
            alphabet_count: avg(|r| r.alphabet_count),
            alphabet_rate: avg(|r| r.alphabet_rate),
            string_count: avg(|r| r.string_count),
            string_rate: avg(|r| r.string_rate),
            initial_path_count: avg(|r| r.initial_path_count),
            initial_path_rate: avg(|r| r.initial_path_rate),
            mapped_string_count: avg(|r| r.mapped_string_count),
            mapped_string_rate: avg(|r| r.mapped_string_rate),
            false_positives: avg(|r| r.false_positives),
            trials: reports.iter().map(|r| r.trials).sum(),
        })
    }
}

/// Scores a finished attack against the ground truth it carries.
pub fn score(state: &MappingState, corpus: &Corpus, key: &TokenAlphabet) -> Result<RecoveryReport> {
    let truth = state
        .ground_truth
        .as_ref()
        .ok_or_else(|| Error::Invalid("mapping state carries no ground truth".into()))?;
    if truth.strings.len() != corpus.len() {
        return Err(Error::Dimension(format!(
            "ground truth covers {} ciphertexts, corpus has {} strings",
            truth.strings.len(),
            corpus.len()
        )));
    }
    let n = corpus.len();
    let m = corpus.alphabet_len();

    let alphabet_count = state
        .row_map()
        .iter()
        .filter(|&(&t, &a)| key.decrypt(t) == Some(a))
        .count();
    let token_ok = |c: char| {
        key.encrypt_char(c)
            .map(|t| state.char_of(t) == Some(c))
            .unwrap_or(false)
    };

    let mut mapped = 0;
    let mut strings = 0;
    let mut initial_paths = 0;
    for (&es, &s) in &truth.strings {
        let matched = state.string_of(es) == Some(s);
        let decryptable = corpus.get(s).charset.iter().all(|&c| token_ok(c));
        mapped += usize::from(matched);
        initial_paths += usize::from(decryptable);
        strings += usize::from(matched || decryptable);
    }
    let (bad_strings, bad_tokens) = state.false_positives().unwrap_or((0, 0));
    let rate = |count: usize, total: usize| {
        if total == 0 {
            0.0
        } else {
            count as f64 / total as f64
        }
    };
    Ok(RecoveryReport {
        knowledge_ratio: 0.0,
        strings_total: n,
        alphabet_total: m,
        known_strings: 0.0,
        alphabet_count: alphabet_count as f64,
        alphabet_rate: rate(alphabet_count, m),
        string_count: strings as f64,
        string_rate: rate(strings, n),
        initial_path_count: initial_paths as f64,
        initial_path_rate: rate(initial_paths, n),
        mapped_string_count: mapped as f64,
        mapped_string_rate: rate(mapped, n),
        false_positives: (bad_strings + bad_tokens) as f64,
        trials: 1,
    })
}
