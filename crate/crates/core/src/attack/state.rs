use std::collections::BTreeMap;

use crate::corpus::StringId;
use crate::sse_sim::{CipherId, Token};

/// The hidden correspondence between ciphertext and plaintext. Only the
/// evaluator reads it; no attack step does.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundTruth {
    pub strings: BTreeMap<CipherId, StringId>,
    pub tokens: BTreeMap<Token, char>,
}

/// Recovered `(es, s)` and `(t, a)` pairs. Both maps are injective and an
/// entry, once set, is never replaced.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappingState {
    col_map: BTreeMap<CipherId, StringId>,
    col_inv: BTreeMap<StringId, CipherId>,
    row_map: BTreeMap<Token, char>,
    row_inv: BTreeMap<char, Token>,
    pub ground_truth: Option<GroundTruth>,
}

impl MappingState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_ground_truth(truth: GroundTruth) -> Self {
        Self {
            ground_truth: Some(truth),
            ..Self::default()
        }
    }

    /// Records `(es, s)` unless either side is already mapped.
    pub fn insert_string(&mut self, es: CipherId, s: StringId) -> bool {
        if self.col_map.contains_key(&es) || self.col_inv.contains_key(&s) {
            return false;
        }
        self.col_map.insert(es, s);
        self.col_inv.insert(s, es);
        true
    }

    /// Records `(t, a)` unless either side is already mapped.
    pub fn insert_token(&mut self, t: Token, a: char) -> bool {
        if self.row_map.contains_key(&t) || self.row_inv.contains_key(&a) {
            return false;
        }
        self.row_map.insert(t, a);
        self.row_inv.insert(a, t);
        true
    }

    pub fn string_of(&self, es: CipherId) -> Option<StringId> {
        self.col_map.get(&es).copied()
    }

    pub fn cipher_of(&self, s: StringId) -> Option<CipherId> {
        self.col_inv.get(&s).copied()
    }

    pub fn char_of(&self, t: Token) -> Option<char> {
        self.row_map.get(&t).copied()
    }

    pub fn token_of(&self, a: char) -> Option<Token> {
        self.row_inv.get(&a).copied()
    }

    /// `S_c`, ordered by ciphertext id.
    pub fn col_map(&self) -> &BTreeMap<CipherId, StringId> {
        &self.col_map
    }

    /// `S_r`, ordered by token.
    pub fn row_map(&self) -> &BTreeMap<Token, char> {
        &self.row_map
    }

    pub fn strings_mapped(&self) -> usize {
        self.col_map.len()
    }

    pub fn tokens_mapped(&self) -> usize {
        self.row_map.len()
    }

    /// Mappings that disagree with the ground truth, as
    /// `(wrong strings, wrong tokens)`. `None` without ground truth.
    pub fn false_positives(&self) -> Option<(usize, usize)> {
        let truth = self.ground_truth.as_ref()?;
        let strings = self
            .col_map
            .iter()
            .filter(|(es, s)| truth.strings.get(es) != Some(s))
            .count();
        let tokens = self
            .row_map
            .iter()
            .filter(|(t, a)| truth.tokens.get(t) != Some(a))
            .count();
        Some((strings, tokens))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_are_never_overwritten() {
        let mut s = MappingState::new();
        assert!(s.insert_string(CipherId(0), StringId(3)));
        assert!(!s.insert_string(CipherId(0), StringId(4)));
        assert!(!s.insert_string(CipherId(1), StringId(3)));
        assert_eq!(s.string_of(CipherId(0)), Some(StringId(3)));
        assert_eq!(s.cipher_of(StringId(3)), Some(CipherId(0)));

        assert!(s.insert_token(Token(100), 'a'));
        assert!(!s.insert_token(Token(100), 'b'));
        assert!(!s.insert_token(Token(101), 'a'));
        assert_eq!(s.tokens_mapped(), 1);
    }

    #[test]
    fn false_positives_against_truth() {
        let truth = GroundTruth {
            strings: [(CipherId(0), StringId(1)), (CipherId(1), StringId(0))].into(),
            tokens: [(Token(100), 'a')].into(),
        };
        let mut s = MappingState::with_ground_truth(truth);
        s.insert_string(CipherId(0), StringId(1));
        s.insert_string(CipherId(1), StringId(2));
        s.insert_token(Token(100), 'a');
        assert_eq!(s.false_positives(), Some((1, 0)));
        assert_eq!(MappingState::new().false_positives(), None);
    }
}
