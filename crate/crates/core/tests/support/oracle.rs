//! Brute-force reference for small instances.
//!
//! Enumerates every injective assignment of known strings to ciphertext
//! columns that agrees with the attacker-visible data and intersects them.
//! Two notions of agreement are offered:
//!
//! * `by_counts`: column sums and pairwise shared-character counts.
//! * `by_incidence`: there is also a bijection between tokens and character
//!   slots under which the known columns of `B` and `A''` coincide.
//!
//! Everything is recomputed from dense 0/1 matrices.

#![allow(dead_code)]

use std::collections::BTreeSet;

use ssleak_core::{CharSlot, CipherId, Corpus, KnowledgeSplit, Scenario, StringId, Token};

pub struct Dense {
    pub b: Vec<Vec<u8>>,
    pub a: Vec<Vec<u8>>,
    pub b_cols: Vec<CipherId>,
    pub a_cols: Vec<StringId>,
    pub tokens: Vec<Token>,
    pub slots: Vec<CharSlot>,
}

impl Dense {
    pub fn of(sc: &Scenario) -> Self {
        Self {
            b: sc.b.to_dense(),
            a: sc.a2.to_dense(),
            b_cols: sc.b.col_labels().to_vec(),
            a_cols: sc.a2.col_labels().to_vec(),
            tokens: sc.b.row_labels().to_vec(),
            slots: sc.a2.row_labels().to_vec(),
        }
    }

    fn b_col(&self, j: usize) -> Vec<u8> {
        self.b.iter().map(|r| r[j]).collect()
    }

    fn a_col(&self, j: usize) -> Vec<u8> {
        self.a.iter().map(|r| r[j]).collect()
    }
}

fn shared(x: &[u8], y: &[u8]) -> usize {
    x.iter()
        .zip(y)
        .filter(|(p, q)| **p == 1 && **q == 1)
        .count()
}

fn total(x: &[u8]) -> usize {
    x.iter().map(|&v| v as usize).sum()
}

/// All injective `f: known -> ciphertext column` agreeing on column sums and
/// shared-character counts. `f[j']` is a `B` column index.
pub fn count_consistent_assignments(d: &Dense) -> Vec<Vec<usize>> {
    let bc: Vec<Vec<u8>> = (0..d.b_cols.len()).map(|j| d.b_col(j)).collect();
    let ac: Vec<Vec<u8>> = (0..d.a_cols.len()).map(|j| d.a_col(j)).collect();
    let mut out = Vec::new();
    let mut f = Vec::new();
    let mut used = vec![false; bc.len()];
    fn rec(
        bc: &[Vec<u8>],
        ac: &[Vec<u8>],
        f: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let jp = f.len();
        if jp == ac.len() {
            out.push(f.clone());
            return;
        }
        for j in 0..bc.len() {
            if used[j] || total(&bc[j]) != total(&ac[jp]) {
                continue;
            }
            let agrees = f
                .iter()
                .enumerate()
                .all(|(kp, &k)| shared(&bc[j], &bc[k]) == shared(&ac[jp], &ac[kp]));
            if !agrees {
                continue;
            }
            used[j] = true;
            f.push(j);
            rec(bc, ac, f, used, out);
            f.pop();
            used[j] = false;
        }
    }
    rec(&bc, &ac, &mut f, &mut used, &mut out);
    out
}

/// All bijections `g: slot -> token` under which every known column of `A''`
/// equals its image column of `B` under `f`. `g[i]` is a `B` row index.
pub fn row_bijections(d: &Dense, f: &[usize]) -> Vec<Vec<usize>> {
    let m = d.slots.len();
    let compatible = |slot: usize, tok: usize| {
        f.iter()
            .enumerate()
            .all(|(jp, &j)| d.a[slot][jp] == d.b[tok][j])
    };
    let mut out = Vec::new();
    let mut g = Vec::new();
    let mut used = vec![false; m];
    fn rec(
        m: usize,
        ok: &dyn Fn(usize, usize) -> bool,
        g: &mut Vec<usize>,
        used: &mut [bool],
        out: &mut Vec<Vec<usize>>,
    ) {
        let slot = g.len();
        if slot == m {
            out.push(g.clone());
            return;
        }
        for t in 0..m {
            if !used[t] && ok(slot, t) {
                used[t] = true;
                g.push(t);
                rec(m, ok, g, used, out);
                g.pop();
                used[t] = false;
            }
        }
    }
    rec(m, &compatible, &mut g, &mut used, &mut out);
    out
}

#[derive(Debug, Default)]
pub struct Forced {
    pub strings: BTreeSet<(CipherId, StringId)>,
    pub tokens: BTreeSet<(Token, char)>,
    /// Number of consistent hypotheses the intersection was taken over.
    pub hypotheses: usize,
}

fn intersect<T: Ord + Clone>(acc: &mut Option<BTreeSet<T>>, next: BTreeSet<T>) {
    *acc = Some(match acc.take() {
        None => next,
        Some(prev) => prev.intersection(&next).cloned().collect(),
    });
}

fn string_pairs(d: &Dense, f: &[usize]) -> BTreeSet<(CipherId, StringId)> {
    f.iter()
        .enumerate()
        .map(|(jp, &j)| (d.b_cols[j], d.a_cols[jp]))
        .collect()
}

/// Pairs present in every assignment agreeing on sums and shared counts.
pub fn forced_by_counts(sc: &Scenario) -> Forced {
    let d = Dense::of(sc);
    let fs = count_consistent_assignments(&d);
    let mut strings = None;
    for f in &fs {
        intersect(&mut strings, string_pairs(&d, f));
    }
    Forced {
        strings: strings.unwrap_or_default(),
        tokens: BTreeSet::new(),
        hypotheses: fs.len(),
    }
}

/// Pairs present in every `(f, g)` under which the known part of `B` is a
/// relabelling of `A''`.
pub fn forced_by_incidence(sc: &Scenario) -> Forced {
    let d = Dense::of(sc);
    let mut strings = None;
    let mut tokens = None;
    let mut hypotheses = 0;
    for f in count_consistent_assignments(&d) {
        for g in row_bijections(&d, &f) {
            hypotheses += 1;
            intersect(&mut strings, string_pairs(&d, &f));
            let t: BTreeSet<(Token, char)> = g
                .iter()
                .enumerate()
                .filter_map(|(slot, &tok)| match d.slots[slot] {
                    CharSlot::Known(c) => Some((d.tokens[tok], c)),
                    CharSlot::Unknown(_) => None,
                })
                .collect();
            intersect(&mut tokens, t);
        }
    }
    Forced {
        strings: strings.unwrap_or_default(),
        tokens: tokens.unwrap_or_default(),
        hypotheses,
    }
}

pub struct Case {
    pub texts: Vec<String>,
    pub known: Vec<usize>,
    pub seed: u64,
}

impl Case {
    pub fn build(&self) -> (Corpus, Scenario) {
        let corpus = Corpus::from_strings(self.texts.iter().cloned()).unwrap();
        let known = self.known.iter().map(|&i| StringId(i)).collect();
        let split = KnowledgeSplit::from_ids(&corpus, known);
        let sc = Scenario::build(&corpus, split, self.seed).unwrap();
        (corpus, sc)
    }
}

fn subsets_of(alphabet: &[char]) -> Vec<String> {
    (1u32..1 << alphabet.len())
        .map(|mask| {
            alphabet
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &c)| c)
                .collect()
        })
        .collect()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Every corpus of 2-4 distinct character sets over `{a,b,c}`, every corpus
/// of 4 distinct character sets over `{a,b,c,d}`, each paired with every
/// non-empty known subset.
pub fn exhaustive_family() -> Vec<Case> {
    let mut corpora: Vec<Vec<String>> = Vec::new();
    let three = subsets_of(&['a', 'b', 'c']);
    for k in 2..=4 {
        for pick in combinations(three.len(), k) {
            corpora.push(pick.iter().map(|&i| three[i].clone()).collect());
        }
    }
    let four = subsets_of(&['a', 'b', 'c', 'd']);
    for pick in combinations(four.len(), 4) {
        corpora.push(pick.iter().map(|&i| four[i].clone()).collect());
    }
    let mut cases = Vec::new();
    for (ci, texts) in corpora.into_iter().enumerate() {
        let n = texts.len();
        for mask in 1u32..1 << n {
            let known = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            cases.push(Case {
                texts: texts.clone(),
                known,
                seed: (ci as u64) << 8 | u64::from(mask),
            });
        }
    }
    cases
}

/// Random corpora of at most six strings over at most six characters. Texts
/// may repeat characters and share character sets.
pub fn random_case(rng: &mut impl rand::Rng) -> Case {
    let alphabet: Vec<char> = "abcdef".chars().take(rng.gen_range(1..=6)).collect();
    let n = rng.gen_range(1..=6);
    let texts: Vec<String> = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=4);
            (0..len)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect()
        })
        .collect();
    let distinct = Corpus::from_strings(texts.iter().cloned()).unwrap().len();
    let mut known: Vec<usize> = (0..distinct).filter(|_| rng.gen_bool(0.5)).collect();
    if known.is_empty() {
        known.push(rng.gen_range(0..distinct));
    }
    Case {
        texts,
        known,
        seed: rng.gen(),
    }
}
