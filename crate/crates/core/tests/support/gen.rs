//! Random corpora with a skewed character distribution and varied lengths,
//! so that column sums spread out and every attack step gets exercised.

#![allow(dead_code)]

use rand::Rng;
use ssleak_core::Corpus;

pub const PRINTABLE: &str = "!\"#$%&'()*+,-./0123456789:;<=>?@ABCDEFGHIJKLMNOPQRSTUVWXYZ[\\]^_`abcdefghijklmnopqrstuvwxyz{|}~";

/// `n` strings over the first `m` printable characters; character `i` is
/// drawn with weight `1 / (i + 1)`.
pub fn skewed_corpus(rng: &mut impl Rng, n: usize, m: usize, max_len: usize) -> Corpus {
    let alphabet: Vec<char> = PRINTABLE.chars().take(m).collect();
    let weights: Vec<f64> = (0..m).map(|i| 1.0 / (i + 1) as f64).collect();
    let dist = rand::distributions::WeightedIndex::new(&weights).unwrap();
    let texts: Vec<String> = (0..n)
        .map(|_| {
            let len = rng.gen_range(1..=max_len);
            (0..len).map(|_| alphabet[rng.sample(&dist)]).collect()
        })
        .collect();
    Corpus::from_strings(texts).unwrap()
}
