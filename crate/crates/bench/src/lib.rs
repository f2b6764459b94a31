//! Fixtures shared by the benchmarks.

use std::path::{Path, PathBuf};

use ssleak_core::{load_corpus_path, sample, Corpus, LoadOptions, StopWords};

pub fn corpus_path() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/changelog_corpus.txt")
}

/// A sample of `n` strings from the bundled corpus.
pub fn corpus(n: usize) -> Corpus {
    let full = load_corpus_path(
        &corpus_path(),
        &StopWords::english(),
        LoadOptions::default(),
    )
    .expect("bundled corpus loads");
    sample(&full, n, 1).expect("bundled corpus is large enough")
}
