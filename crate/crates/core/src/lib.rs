//! Leakage simulation for suffix-tree substring-searchable encryption and a
//! matrix attack that recovers strings and characters from that leakage when
//! part of the plaintext dataset is known.
//!
//! The pipeline is:
//!
//! 1. [`corpus`] turns raw text into a deduplicated set of strings.
//! 2. [`sse_sim`] keys and encrypts the strings, builds the suffix tree and
//!    emits the prefix-node and leaf leakage, reduced to the token incidence
//!    matrix `B`.
//! 3. [`attack`] matches `B` against the attacker's known strings.
//! 4. [`eval`] scores the outcome and sweeps knowledge and dataset size.

pub mod attack;
pub mod bits;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod io;
pub mod matrix;
pub mod scenario;
pub mod seed;
pub mod sse_sim;

pub use attack::{run_attack, AttackConfig, AttackOutcome, GroundTruth, MappingState};
pub use corpus::{
    load_corpus, load_corpus_path, sample, split_knowledge, Corpus, KnowledgeSplit, LoadOptions,
    StopWords, StringId, StringRecord,
};
pub use error::{Error, Result};
pub use eval::{fit_logistic, score, sweep_knowledge, sweep_scale, LogisticFit, RecoveryReport};
pub use matrix::{build_cooccurrence, CharSlot, CooccurrenceMatrix, IncidenceMatrix};
pub use scenario::Scenario;
pub use sse_sim::{
    build_suffix_tree, emit_leakage, encrypt_corpus, gen_key, reduce_to_incidence, CipherId,
    EncryptedCorpus, EncryptedString, SuffixTree, Token, TokenAlphabet,
};
