//! Simulated substring-searchable encryption: keying, encryption, the
//! suffix-tree index, and the leakage it emits.

pub mod key;
pub mod leakage;
pub mod suffix_tree;

pub use key::{
    char_eq, decrypt_tokens, encrypt_corpus, encrypt_string, gen_key, CipherId, EncryptedCorpus,
    EncryptedString, Token, TokenAlphabet,
};
pub use leakage::{
    emit_leaf_leakage, emit_leakage, emit_prefix_leakage, incidence_from_tree, leaf_leakage,
    prefix_leakage, reduce_to_incidence, LeakageMatrix, LeakageProfile,
};
pub use suffix_tree::{build_suffix_tree, NodeId, Occurrence, SuffixTree};
