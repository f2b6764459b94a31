//! One simulated deployment plus one attacker: the key, the uploaded
//! ciphertexts, and every matrix the attack is allowed to see.

use crate::attack::{
    build_a_double_prime, build_a_prime, run_attack_from, AttackConfig, AttackOutcome,
    CipherMatrix, GroundTruth, MappingState, PlainMatrix,
};
use crate::corpus::{Corpus, KnowledgeSplit, StringId};
use crate::error::Result;
use crate::matrix::{build_cooccurrence, CooccurrenceMatrix, IncidenceMatrix};
use crate::sse_sim::{
    encrypt_corpus, gen_key, reduce_to_incidence, CipherId, EncryptedCorpus, TokenAlphabet,
};

pub struct Scenario {
    pub key: TokenAlphabet,
    pub encrypted: EncryptedCorpus,
    pub split: KnowledgeSplit,
    /// `B`, rows in ascending token order.
    pub b: CipherMatrix,
    pub a_prime: IncidenceMatrix<char, StringId>,
    pub a2: PlainMatrix,
    pub m: CooccurrenceMatrix<CipherId>,
    pub m_prime: CooccurrenceMatrix<StringId>,
}

impl Scenario {
    /// Keys and encrypts `corpus` under `seed`, then prepares the attacker's
    /// view for the given knowledge split.
    pub fn build(corpus: &Corpus, split: KnowledgeSplit, seed: u64) -> Result<Self> {
        let key = gen_key(corpus.alphabet(), seed)?;
        let encrypted = encrypt_corpus(corpus, &key, seed)?;
        let b = reduce_to_incidence(&encrypted.ciphertexts, &key.tokens())?;
        Self::from_parts(corpus, key, encrypted, b, split)
    }

    /// Like [`Scenario::build`] but with an externally supplied `B`, e.g. one
    /// read back from CSV. `B` must describe `encrypted`.
    pub fn from_parts(
        corpus: &Corpus,
        key: TokenAlphabet,
        encrypted: EncryptedCorpus,
        b: CipherMatrix,
        split: KnowledgeSplit,
    ) -> Result<Self> {
        let a_prime = build_a_prime(corpus, &split);
        let a2 = build_a_double_prime(&a_prime, b.rows())?;
        let m = build_cooccurrence(&b);
        let m_prime = build_cooccurrence(&a2);
        Ok(Self {
            key,
            encrypted,
            split,
            b,
            a_prime,
            a2,
            m,
            m_prime,
        })
    }

    pub fn ground_truth(&self) -> GroundTruth {
        GroundTruth {
            strings: self
                .encrypted
                .ciphertexts
                .iter()
                .zip(&self.encrypted.truth)
                .map(|(es, &s)| (es.id, s))
                .collect(),
            tokens: self.key.forward().iter().map(|(&c, &t)| (t, c)).collect(),
        }
    }

    /// Runs the attack; the returned state carries the ground truth for
    /// scoring.
    pub fn attack(&self, cfg: &AttackConfig) -> Result<AttackOutcome> {
        run_attack_from(
            &self.b,
            &self.a2,
            &self.m,
            &self.m_prime,
            cfg,
            MappingState::with_ground_truth(self.ground_truth()),
        )
    }
}
