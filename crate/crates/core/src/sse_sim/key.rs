//! Simulated keying: a secret bijection from characters to distinct
//! three-digit integer tokens, and per-character substitution encryption.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, StringId, StringRecord};
use crate::error::{Error, Result};
use crate::seed::{self, Stream};

pub const TOKEN_MIN: u16 = 100;
pub const TOKEN_MAX: u16 = 999;
pub const TOKEN_SPACE: usize = (TOKEN_MAX - TOKEN_MIN + 1) as usize;

/// Ciphertext-side alphabet symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Token(pub u16);

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of an encrypted string as the server sees it. Unrelated to the
/// plaintext [`StringId`] of the same string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CipherId(pub usize);

impl fmt::Display for CipherId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The simulated secret key `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenAlphabet {
    forward: BTreeMap<char, Token>,
    inverse: BTreeMap<Token, char>,
    seed: u64,
}

impl TokenAlphabet {
    pub fn encrypt_char(&self, c: char) -> Result<Token> {
        self.forward
            .get(&c)
            .copied()
            .ok_or(Error::UnknownCharacter(c))
    }

    pub fn decrypt(&self, t: Token) -> Option<char> {
        self.inverse.get(&t).copied()
    }

    /// Tokens in ascending order.
    pub fn tokens(&self) -> Vec<Token> {
        self.inverse.keys().copied().collect()
    }

    pub fn forward(&self) -> &BTreeMap<char, Token> {
        &self.forward
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Maps each character of `alphabet` to a distinct token drawn from a
/// seeded shuffle of 100..=999.
pub fn gen_key(alphabet: &[char], seed: u64) -> Result<TokenAlphabet> {
    let distinct: BTreeSet<char> = alphabet.iter().copied().collect();
    if distinct.len() > TOKEN_SPACE {
        return Err(Error::AlphabetTooLarge(distinct.len()));
    }
    if distinct.len() != alphabet.len() {
        return Err(Error::Invalid(
            "alphabet contains repeated characters".into(),
        ));
    }
    let mut pool: Vec<u16> = (TOKEN_MIN..=TOKEN_MAX).collect();
    pool.shuffle(&mut seed::stream_rng(seed, Stream::Key));
    let forward: BTreeMap<char, Token> = alphabet
        .iter()
        .zip(pool)
        .map(|(&c, t)| (c, Token(t)))
        .collect();
    let inverse = forward.iter().map(|(&c, &t)| (t, c)).collect();
    Ok(TokenAlphabet {
        forward,
        inverse,
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncryptedString {
    pub id: CipherId,
    pub tokens: Vec<Token>,
    /// Distinct tokens, sorted.
    pub tokenset: Vec<Token>,
}

impl EncryptedString {
    pub fn new(id: CipherId, tokens: Vec<Token>) -> Self {
        let tokenset = tokens
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Self {
            id,
            tokens,
            tokenset,
        }
    }
}

/// Per-character substitution. The ciphertext id is taken from the plaintext
/// id; [`encrypt_corpus`] assigns server-side ids.
pub fn encrypt_string(s: &StringRecord, key: &TokenAlphabet) -> Result<EncryptedString> {
    let tokens = s
        .text
        .chars()
        .map(|c| key.encrypt_char(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(EncryptedString::new(CipherId(s.id.0), tokens))
}

pub fn decrypt_tokens(tokens: &[Token], key: &TokenAlphabet) -> Option<String> {
    tokens.iter().map(|&t| key.decrypt(t)).collect()
}

/// Searchable ciphertext for a whole corpus. The upload order is a seeded
/// shuffle, so ciphertext id `j` does not in general hold plaintext `j`.
#[derive(Debug, Clone)]
pub struct EncryptedCorpus {
    pub ciphertexts: Vec<EncryptedString>,
    /// `truth[j]` is the plaintext string behind `CipherId(j)`.
    pub truth: Vec<StringId>,
}

pub fn encrypt_corpus(corpus: &Corpus, key: &TokenAlphabet, seed: u64) -> Result<EncryptedCorpus> {
    let mut order: Vec<usize> = (0..corpus.len()).collect();
    order.shuffle(&mut seed::stream_rng(seed, Stream::CipherOrder));
    let mut ciphertexts = Vec::with_capacity(order.len());
    let mut truth = Vec::with_capacity(order.len());
    for (j, &p) in order.iter().enumerate() {
        let record = &corpus.strings()[p];
        let mut es = encrypt_string(record, key)?;
        es.id = CipherId(j);
        ciphertexts.push(es);
        truth.push(record.id);
    }
    Ok(EncryptedCorpus { ciphertexts, truth })
}

/// Length of the longest common prefix.
pub fn char_eq<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}
