//! Plaintext corpus: string extraction, deduplication, sampling and the
//! attacker's knowledge split.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::fs;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Stream};

const DEFAULT_STOPWORDS: &str = include_str!("../data/stopwords_en.txt");

/// Index of a plaintext string within its corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StringId(pub usize);

impl fmt::Display for StringId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringRecord {
    pub id: StringId,
    pub text: String,
    /// Distinct characters of `text`, sorted.
    pub charset: Vec<char>,
}

impl StringRecord {
    fn new(id: StringId, text: String) -> Self {
        let charset = text.chars().collect::<BTreeSet<_>>().into_iter().collect();
        Self { id, text, charset }
    }

    pub fn len(&self) -> usize {
        self.text.chars().count()
    }

    pub fn is_empty(&self) -> bool {
        self.text.is_empty()
    }
}

/// Deduplicated strings `S` and their alphabet `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    strings: Vec<StringRecord>,
    alphabet: Vec<char>,
}

impl Corpus {
    /// Builds a corpus from already-extracted strings. Empty strings are
    /// dropped, repeated texts keep their first occurrence, ids are assigned
    /// in order.
    pub fn from_strings<I, S>(strings: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut seen = HashSet::new();
        let mut records = Vec::new();
        for s in strings {
            let s = s.into();
            if s.is_empty() || !seen.insert(s.clone()) {
                continue;
            }
            records.push(StringRecord::new(StringId(records.len()), s));
        }
        if records.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let alphabet = alphabet_of(&records);
        Ok(Self {
            strings: records,
            alphabet,
        })
    }

    pub fn strings(&self) -> &[StringRecord] {
        &self.strings
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    pub fn get(&self, id: StringId) -> &StringRecord {
        &self.strings[id.0]
    }

    /// Number of strings, `n`.
    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    /// Alphabet size, `m`.
    pub fn alphabet_len(&self) -> usize {
        self.alphabet.len()
    }

    /// Sub-corpus of the given positions, renumbered in the given order.
    pub fn subset(&self, positions: &[usize]) -> Result<Self> {
        Self::from_strings(positions.iter().map(|&p| self.strings[p].text.clone()))
    }
}

fn alphabet_of(records: &[StringRecord]) -> Vec<char> {
    records
        .iter()
        .flat_map(|r| r.charset.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

/// Case-insensitive stop-word set.
#[derive(Debug, Clone, Default)]
pub struct StopWords(HashSet<String>);

impl StopWords {
    pub fn none() -> Self {
        Self::default()
    }

    /// The bundled common-English list.
    pub fn english() -> Self {
        Self::parse(DEFAULT_STOPWORDS)
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(str::to_lowercase)
                .collect(),
        )
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn insert(&mut self, word: &str) {
        self.0.insert(word.to_lowercase());
    }

    pub fn contains(&self, word: &str) -> bool {
        self.0.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<S: AsRef<str>> FromIterator<S> for StopWords {
    fn from_iter<T: IntoIterator<Item = S>>(iter: T) -> Self {
        Self(
            iter.into_iter()
                .map(|s| s.as_ref().to_lowercase())
                .collect(),
        )
    }
}

/// Which characters a string may contain to survive extraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CharFilter {
    /// The 94 printable ASCII symbols `!`..=`~`.
    PrintableAscii,
    Any,
}

impl CharFilter {
    fn accepts(self, token: &str) -> bool {
        match self {
            CharFilter::PrintableAscii => token.bytes().all(|b| (b'!'..=b'~').contains(&b)),
            CharFilter::Any => true,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LoadOptions {
    pub filter: CharFilter,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            filter: CharFilter::PrintableAscii,
        }
    }
}

/// Extracts whitespace-delimited strings from line-delimited text, dropping
/// stop words and strings outside the printable-ASCII alphabet.
pub fn load_corpus(source: impl BufRead, stopwords: &StopWords) -> Result<Corpus> {
    load_corpus_with(source, stopwords, LoadOptions::default())
}

pub fn load_corpus_with(
    source: impl BufRead,
    stopwords: &StopWords,
    options: LoadOptions,
) -> Result<Corpus> {
    let mut tokens = Vec::new();
    extract_into(
        source,
        Path::new("<input>"),
        stopwords,
        options,
        &mut tokens,
    )?;
    Corpus::from_strings(tokens)
}

/// Loads a single text file, or every regular file beneath a directory in
/// sorted path order.
pub fn load_corpus_path(
    path: &Path,
    stopwords: &StopWords,
    options: LoadOptions,
) -> Result<Corpus> {
    let mut files = Vec::new();
    collect_files(path, &mut files)?;
    files.sort();
    let mut tokens = Vec::new();
    for file in &files {
        let handle = fs::File::open(file).map_err(|e| Error::io(file, e))?;
        extract_into(
            std::io::BufReader::new(handle),
            file,
            stopwords,
            options,
            &mut tokens,
        )?;
    }
    Corpus::from_strings(tokens)
}

fn collect_files(path: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let meta = fs::metadata(path).map_err(|e| Error::io(path, e))?;
    if meta.is_file() {
        out.push(path.to_path_buf());
        return Ok(());
    }
    for entry in fs::read_dir(path).map_err(|e| Error::io(path, e))? {
        let entry = entry.map_err(|e| Error::io(path, e))?;
        collect_files(&entry.path(), out)?;
    }
    Ok(())
}

fn extract_into(
    source: impl BufRead,
    path: &Path,
    stopwords: &StopWords,
    options: LoadOptions,
    out: &mut Vec<String>,
) -> Result<()> {
    for (lineno, line) in source.split(b'\n').enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = String::from_utf8(line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            message: format!("invalid UTF-8: {e}"),
        })?;
        out.extend(
            line.split_whitespace()
                .filter(|t| options.filter.accepts(t) && !stopwords.contains(t))
                .map(str::to_owned),
        );
    }
    Ok(())
}

/// Uniform sample of `count` strings without replacement. Sampled strings
/// keep their relative corpus order and are renumbered from zero.
pub fn sample(corpus: &Corpus, count: usize, seed: u64) -> Result<Corpus> {
    if count == 0 || count > corpus.len() {
        return Err(Error::SampleSize {
            requested: count,
            available: corpus.len(),
        });
    }
    let mut rng = seed::stream_rng(seed, Stream::Sample);
    let mut picked = index::sample(&mut rng, corpus.len(), count).into_vec();
    picked.sort_unstable();
    corpus.subset(&picked)
}

/// The attacker's partially known dataset: `S'` and the characters `A'` it
/// contains.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeSplit {
    /// Sorted ids of known strings.
    pub known_ids: Vec<StringId>,
    /// Sorted union of known strings' charsets.
    pub known_alphabet: Vec<char>,
    pub ratio: f64,
}

impl KnowledgeSplit {
    pub fn from_ids(corpus: &Corpus, mut ids: Vec<StringId>) -> Self {
        ids.sort_unstable();
        ids.dedup();
        let known_alphabet = ids
            .iter()
            .flat_map(|&id| corpus.get(id).charset.iter().copied())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        let ratio = ids.len() as f64 / corpus.len() as f64;
        Self {
            known_ids: ids,
            known_alphabet,
            ratio,
        }
    }
}

pub fn split_knowledge(corpus: &Corpus, ratio: f64, seed: u64) -> Result<KnowledgeSplit> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::KnowledgeRatio(ratio));
    }
    let n = corpus.len();
    let count = ((ratio * n as f64).round() as usize).min(n);
    let mut rng = seed::stream_rng(seed, Stream::Knowledge);
    let ids = index::sample(&mut rng, n, count)
        .into_iter()
        .map(StringId)
        .collect();
    let mut split = KnowledgeSplit::from_ids(corpus, ids);
    split.ratio = ratio;
    Ok(split)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn texts(c: &Corpus) -> Vec<&str> {
        c.strings().iter().map(|r| r.text.as_str()).collect()
    }

    #[test]
    fn stop_words_are_removed() {
        let stop: StopWords = ["the"].into_iter().collect();
        let c = load_corpus("the cat\nthe dog\n".as_bytes(), &stop).unwrap();
        assert_eq!(texts(&c), ["cat", "dog"]);
        assert_eq!(c.alphabet(), ['a', 'c', 'd', 'g', 'o', 't']);
    }

    #[test]
    fn hello_help_alphabet() {
        let c = load_corpus("hello help".as_bytes(), &StopWords::none()).unwrap();
        assert_eq!(texts(&c), ["hello", "help"]);
        assert_eq!(c.alphabet(), ['e', 'h', 'l', 'o', 'p']);
        assert_eq!(c.get(StringId(0)).charset, ['e', 'h', 'l', 'o']);
    }

    #[test]
    fn stop_words_match_case_insensitively_but_strings_keep_case() {
        let c = load_corpus("The Cat the cat".as_bytes(), &StopWords::english()).unwrap();
        assert_eq!(texts(&c), ["Cat", "cat"]);
    }

    #[test]
    fn empty_after_filtering_is_an_error() {
        let err = load_corpus("the of and\n\n".as_bytes(), &StopWords::english()).unwrap_err();
        assert!(matches!(err, Error::EmptyCorpus));
        assert!(matches!(
            load_corpus("".as_bytes(), &StopWords::none()),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn non_ascii_tokens_are_filtered_by_default() {
        let c = load_corpus("café cafe".as_bytes(), &StopWords::none()).unwrap();
        assert_eq!(texts(&c), ["cafe"]);
        let opts = LoadOptions {
            filter: CharFilter::Any,
        };
        let c = load_corpus_with("café cafe".as_bytes(), &StopWords::none(), opts).unwrap();
        assert_eq!(c.len(), 2);
    }

    #[test]
    fn duplicates_are_removed() {
        let c = load_corpus("ab ab ba\nab".as_bytes(), &StopWords::none()).unwrap();
        assert_eq!(texts(&c), ["ab", "ba"]);
    }

    #[test]
    fn invalid_utf8_reports_line() {
        let bytes: &[u8] = b"ok\n\xff\xfe\n";
        match load_corpus(bytes, &StopWords::none()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn full_sample_keeps_every_string() {
        let words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let c = Corpus::from_strings(words.clone()).unwrap();
        let s = sample(&c, 10, 99).unwrap();
        let mut got: Vec<_> = texts(&s).into_iter().map(str::to_owned).collect();
        got.sort();
        let mut want = words;
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn sample_is_deterministic_and_bounded() {
        let c = Corpus::from_strings((0..100).map(|i| format!("s{i}"))).unwrap();
        assert_eq!(sample(&c, 30, 5).unwrap(), sample(&c, 30, 5).unwrap());
        assert_ne!(sample(&c, 30, 5).unwrap(), sample(&c, 30, 6).unwrap());
        assert!(matches!(
            sample(&c, 101, 1),
            Err(Error::SampleSize {
                requested: 101,
                available: 100
            })
        ));
    }

    #[test]
    fn split_sizes() {
        let c = Corpus::from_strings(["ab", "bc", "cd", "de"]).unwrap();
        let s = split_knowledge(&c, 0.5, 3).unwrap();
        assert_eq!(s.known_ids.len(), 2);
        assert_eq!(s, split_knowledge(&c, 0.5, 3).unwrap());

        let all = split_knowledge(&c, 1.0, 3).unwrap();
        assert_eq!(all.known_ids.len(), 4);
        assert_eq!(all.known_alphabet, c.alphabet());

        let big = Corpus::from_strings((0..5000).map(|i| format!("x{i}"))).unwrap();
        assert_eq!(split_knowledge(&big, 0.1, 1).unwrap().known_ids.len(), 500);
    }

    #[test]
    fn split_rejects_bad_ratios() {
        let c = Corpus::from_strings(["a"]).unwrap();
        for r in [0.0, -0.1, 1.01, f64::NAN] {
            assert!(matches!(
                split_knowledge(&c, r, 0),
                Err(Error::KnowledgeRatio(_))
            ));
        }
    }

    proptest! {
        #[test]
        fn corpus_invariants(words in proptest::collection::vec("[a-dA-D!?0-9]{1,6}", 1..40),
                             ratio in 0.01f64..=1.0, seed in any::<u64>()) {
            let c = Corpus::from_strings(words).unwrap();
            let set: HashSet<_> = texts(&c).into_iter().collect();
            prop_assert_eq!(set.len(), c.len());
            let union: BTreeSet<char> = c.strings().iter().flat_map(|r| r.text.chars()).collect();
            prop_assert_eq!(union.into_iter().collect::<Vec<_>>(), c.alphabet().to_vec());
            for r in c.strings() {
                let cs: BTreeSet<char> = r.text.chars().collect();
                prop_assert_eq!(cs.into_iter().collect::<Vec<_>>(), r.charset.clone());
            }

            let split = split_knowledge(&c, ratio, seed).unwrap();
            prop_assert_eq!(split.known_ids.len(), (ratio * c.len() as f64).round() as usize);
            let known: BTreeSet<char> = split.known_ids.iter()
                .flat_map(|&id| c.get(id).text.chars()).collect();
            prop_assert_eq!(known.into_iter().collect::<Vec<_>>(), split.known_alphabet.clone());
            prop_assert!(split.known_alphabet.iter().all(|ch| c.alphabet().contains(ch)));
        }
    }
}
