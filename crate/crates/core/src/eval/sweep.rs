use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::attack::AttackConfig;
use crate::corpus::{split_knowledge, Corpus, KnowledgeSplit};
use crate::error::{Error, Result};
use crate::eval::score::{score, RecoveryReport};
use crate::scenario::Scenario;
use crate::seed::{stream_rng, Stream};

/// Encrypts, attacks and scores one split.
pub fn run_trial(
    corpus: &Corpus,
    split: KnowledgeSplit,
    seed: u64,
    cfg: &AttackConfig,
) -> Result<RecoveryReport> {
    let ratio = split.ratio;
    let known = split.known_ids.len();
    let sc = Scenario::build(corpus, split, seed)?;
    let outcome = sc.attack(cfg)?;
    let mut report = score(&outcome.state, corpus, &sc.key)?.with_knowledge(ratio);
    report.known_strings = known as f64;
    Ok(report)
}

fn check_grid<T>(axis: &[T], seeds: &[u64], what: &str) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::Invalid(format!("no {what} given")));
    }
    if seeds.is_empty() {
        return Err(Error::Invalid("no seeds given".into()));
    }
    Ok(())
}

fn average(reports: Vec<RecoveryReport>, per_point: usize) -> Vec<RecoveryReport> {
    reports
        .chunks(per_point)
        .map(|chunk| RecoveryReport::mean(chunk).expect("chunks are non-empty"))
        .collect()
}

/// Mean recovery over `seeds` at each knowledge ratio, in the order given.
/// Trials run in parallel; averaging is in seed order, so the result does not
/// depend on scheduling.
pub fn sweep_knowledge(
    corpus: &Corpus,
    ratios: &[f64],
    seeds: &[u64],
    cfg: &AttackConfig,
) -> Result<Vec<RecoveryReport>> {
    check_grid(ratios, seeds, "knowledge ratios")?;
    let jobs: Vec<(f64, u64)> = ratios
        .iter()
        .flat_map(|&r| seeds.iter().map(move |&s| (r, s)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(ratio, seed)| {
            let split = split_knowledge(corpus, ratio, seed)?;
            run_trial(corpus, split, seed, cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(average(reports, seeds.len()))
}

/// Mean recovery as the dataset grows with a fixed number of known strings.
///
/// For each seed the corpus is shuffled once; its first `known_count`
/// strings are the attacker's, and the dataset at scale `n` is the first `n`
/// strings of that order. Each scale therefore contains the previous one.
pub fn sweep_scale(
    corpus: &Corpus,
    scales: &[usize],
    known_count: usize,
    seeds: &[u64],
    cfg: &AttackConfig,
) -> Result<Vec<RecoveryReport>> {
    check_grid(scales, seeds, "scales")?;
    if known_count == 0 {
        return Err(Error::Invalid("known string count must be positive".into()));
    }
    for &n in scales {
        if n < known_count || n > corpus.len() {
            return Err(Error::SampleSize {
                requested: n,
                available: corpus.len(),
            });
        }
    }
    let orders: Vec<Vec<usize>> = seeds
        .iter()
        .map(|&seed| {
            let mut order: Vec<usize> = (0..corpus.len()).collect();
            order.shuffle(&mut stream_rng(seed, Stream::Sample));
            order
        })
        .collect();
    let jobs: Vec<(usize, usize)> = scales
        .iter()
        .flat_map(|&n| (0..seeds.len()).map(move |k| (n, k)))
        .collect();
    let reports = jobs
        .par_iter()
        .map(|&(n, k)| {
            let mut chosen = orders[k][..n].to_vec();
            chosen.sort_unstable();
            let sub = corpus.subset(&chosen)?;
            // positions of the first `known_count` shuffled strings inside `sub`
            let known: Vec<usize> = orders[k][..known_count]
                .iter()
                .map(|i| {
                    chosen
                        .binary_search(i)
                        .expect("known strings are in every scale")
                })
                .collect();
            let ids = known.into_iter().map(crate::corpus::StringId).collect();
            let split = KnowledgeSplit::from_ids(&sub, ids);
            run_trial(&sub, split, seeds[k], cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(average(reports, seeds.len()))
}
