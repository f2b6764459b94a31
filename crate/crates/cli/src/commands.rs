use std::fs;
use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use log::{info, warn};
use serde::Serialize;
use ssleak_core::io::{
    write_incidence_csv, write_knowledge_table, write_mappings_csv, write_scale_table,
};
use ssleak_core::sse_sim::{incidence_from_tree, LeakageMatrix};
use ssleak_core::{
    build_suffix_tree, emit_leakage, encrypt_corpus, fit_logistic, gen_key, load_corpus,
    load_corpus_path, sample, score, split_knowledge, sweep_knowledge, sweep_scale, AttackConfig,
    Corpus, LoadOptions, LogisticFit, RecoveryReport, Scenario, StopWords,
};

use crate::args::{
    AttackArgs, CorpusArgs, Mode, PrepareArgs, SimulateArgs, SweepArgs, DEFAULT_RATIOS,
    DEFAULT_SCALES,
};
use crate::output::{write_file_atomic, Staged};
use crate::InvariantViolation;

const STRINGS_FILE: &str = "strings.txt";
const SAMPLE_FILE: &str = "sample.txt";

fn prepared_dir(out: &Path) -> PathBuf {
    out.join("prepared")
}

fn run_dir(out: &Path, seed: u64) -> PathBuf {
    out.join("runs").join(seed.to_string())
}

fn stopwords(path: Option<&Path>) -> Result<StopWords> {
    Ok(match path {
        Some(p) => StopWords::from_path(p)?,
        None => StopWords::english(),
    })
}

fn read_string_list(path: &Path) -> Result<Corpus> {
    let file = fs::File::open(path).with_context(|| {
        format!(
            "reading {} (run `ssleak prepare` first or pass --corpus)",
            path.display()
        )
    })?;
    Ok(load_corpus(BufReader::new(file), &StopWords::none())?)
}

/// Loads the corpus a command works on. `prefer_sample` picks the prepared
/// sample over the full prepared list when both exist.
fn resolve_corpus(out: &Path, input: &CorpusArgs, prefer_sample: bool) -> Result<Corpus> {
    let corpus = match &input.corpus {
        Some(path) => {
            let corpus = load_corpus_path(
                path,
                &stopwords(input.stopwords.as_deref())?,
                LoadOptions::default(),
            )?;
            match input.sample {
                Some(count) => sample(&corpus, count, input.sample_seed)?,
                None => corpus,
            }
        }
        None => {
            ensure!(
                input.stopwords.is_none() && input.sample.is_none(),
                UsageError(
                    "--stopwords and --sample need --corpus; pass them to `prepare` instead".into()
                )
            );
            let dir = prepared_dir(out);
            let sample_path = dir.join(SAMPLE_FILE);
            if prefer_sample && sample_path.exists() {
                read_string_list(&sample_path)?
            } else {
                read_string_list(&dir.join(STRINGS_FILE))?
            }
        }
    };
    info!(
        "corpus: {} strings over {} characters",
        corpus.len(),
        corpus.alphabet_len()
    );
    Ok(corpus)
}

/// Argument combinations clap cannot rule out on its own.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn write_strings(w: &mut dyn Write, corpus: &Corpus) -> Result<()> {
    for s in corpus.strings() {
        writeln!(w, "{}", s.text)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PrepareManifest<'a> {
    source: &'a Path,
    stopwords: Option<&'a Path>,
    stopword_count: usize,
    strings: usize,
    alphabet_size: usize,
    alphabet: String,
    sample: Option<usize>,
    seed: u64,
}

pub fn prepare(out: &Path, args: &PrepareArgs) -> Result<()> {
    let words = stopwords(args.stopwords.as_deref())?;
    let corpus = load_corpus_path(&args.corpus, &words, LoadOptions::default())?;
    let sampled = args
        .sample
        .map(|n| sample(&corpus, n, args.seed))
        .transpose()?;

    let stage = Staged::new(&prepared_dir(out))?;
    stage.write_with(STRINGS_FILE, |w| write_strings(w, &corpus))?;
    if let Some(s) = &sampled {
        stage.write_with(SAMPLE_FILE, |w| write_strings(w, s))?;
    }
    stage.write_json(
        "manifest.json",
        &PrepareManifest {
            source: &args.corpus,
            stopwords: args.stopwords.as_deref(),
            stopword_count: words.len(),
            strings: corpus.len(),
            alphabet_size: corpus.alphabet_len(),
            alphabet: corpus.alphabet().iter().collect(),
            sample: args.sample,
            seed: args.seed,
        },
    )?;
    let dir = stage.promote()?;
    println!(
        "prepared {} strings over {} characters{} in {}",
        corpus.len(),
        corpus.alphabet_len(),
        sampled
            .map(|s| format!(" (sample of {})", s.len()))
            .unwrap_or_default(),
        dir.display()
    );
    Ok(())
}

fn write_leakage<L: std::fmt::Display>(w: &mut dyn Write, m: &LeakageMatrix<L>) -> Result<()> {
    writeln!(w, "query,column,label")?;
    for r in 0..m.bits.rows() {
        for (c, label) in m.columns.iter().enumerate() {
            if m.bits.get(r, c) {
                writeln!(w, "{r},{c},{label}")?;
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct SimulateSummary {
    seed: u64,
    strings: usize,
    alphabet_size: usize,
    tree_nodes: usize,
    tree_leaves: usize,
    incidence_rows: usize,
    incidence_cols: usize,
    incidence_ones: usize,
    leakage: Option<LeakageSummary>,
}

#[derive(Serialize)]
struct LeakageSummary {
    prefix_columns: usize,
    prefix_ones: usize,
    leaf_columns: usize,
    leaf_ones: usize,
}

pub fn simulate(out: &Path, args: &SimulateArgs) -> Result<()> {
    let corpus = resolve_corpus(out, &args.input, true)?;
    let key = gen_key(corpus.alphabet(), args.seed)?;
    let enc = encrypt_corpus(&corpus, &key, args.seed)?;
    let tree = build_suffix_tree(&enc.ciphertexts);
    if let Err(msg) = tree.check_invariants() {
        return Err(InvariantViolation(format!("suffix tree: {msg}")).into());
    }
    let b = ssleak_core::reduce_to_incidence(&enc.ciphertexts, &key.tokens())?;
    let ids: Vec<_> = enc.ciphertexts.iter().map(|es| es.id).collect();
    if incidence_from_tree(&tree, &ids, &key.tokens())? != b {
        return Err(
            InvariantViolation("incidence read from the tree differs from B".into()).into(),
        );
    }

    let stage = Staged::new(&run_dir(out, args.seed))?;
    stage.write_with("B.csv", |w| Ok(write_incidence_csv(&b, w)?))?;
    let leakage = if args.leakage {
        let profile = emit_leakage(&tree, &enc.ciphertexts, args.seed);
        stage.write_with("L1.csv", |w| write_leakage(w, &profile.prefix_matrix))?;
        stage.write_with("L2.csv", |w| write_leakage(w, &profile.leaf_matrix))?;
        let ones = |m: &Vec<Vec<u8>>| m.iter().flatten().filter(|&&v| v == 1).count();
        Some(LeakageSummary {
            prefix_columns: profile.prefix_matrix.columns.len(),
            prefix_ones: ones(&profile.prefix_matrix.to_dense()),
            leaf_columns: profile.leaf_matrix.columns.len(),
            leaf_ones: ones(&profile.leaf_matrix.to_dense()),
        })
    } else {
        None
    };
    let summary = SimulateSummary {
        seed: args.seed,
        strings: corpus.len(),
        alphabet_size: corpus.alphabet_len(),
        tree_nodes: tree.node_count(),
        tree_leaves: tree.leaves().count(),
        incidence_rows: b.rows(),
        incidence_cols: b.cols(),
        incidence_ones: (0..b.cols()).map(|c| b.col_sum(c)).sum(),
        leakage,
    };
    stage.write_json("simulate.json", &summary)?;
    let dir = stage.promote()?;

    if let Some(path) = &args.export_b {
        write_file_atomic(path, |w| Ok(write_incidence_csv(&b, w)?))?;
    }
    if let Some(path) = &args.export_tree {
        write_file_atomic(path, |w| Ok(w.write_all(tree.dump().as_bytes())?))?;
    }
    println!(
        "simulated {} strings: {} tree nodes, B is {}x{}; wrote {}",
        summary.strings,
        summary.tree_nodes,
        summary.incidence_rows,
        summary.incidence_cols,
        dir.display()
    );
    Ok(())
}

#[derive(Serialize)]
struct AttackReport<'a> {
    seed: u64,
    knowledge: f64,
    config: AttackConfig,
    imported_b: Option<&'a Path>,
    rounds: usize,
    report: &'a RecoveryReport,
    trace: &'a [ssleak_core::attack::StepSnapshot],
}

pub fn attack(out: &Path, args: &AttackArgs) -> Result<()> {
    let corpus = resolve_corpus(out, &args.input, true)?;
    let cfg = args.attack.config();
    let split = split_knowledge(&corpus, args.knowledge, args.seed)?;
    let mut sc = Scenario::build(&corpus, split, args.seed)?;
    if let Some(path) = &args.import_b {
        let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
        let b = ssleak_core::io::read_incidence_csv(BufReader::new(file))
            .with_context(|| format!("reading {}", path.display()))?;
        ensure!(
            b.row_labels() == sc.b.row_labels() && b.col_labels() == sc.b.col_labels(),
            "{} does not describe the deployment simulated with seed {} (token or ciphertext labels differ)",
            path.display(),
            args.seed
        );
        if b != sc.b {
            warn!("imported B differs from the simulated one; scoring still uses the simulated ground truth");
        }
        sc = Scenario::from_parts(&corpus, sc.key, sc.encrypted, b, sc.split)?;
    }

    let outcome = sc.attack(&cfg)?;
    let mut report = score(&outcome.state, &corpus, &sc.key)?.with_knowledge(args.knowledge);
    report.known_strings = sc.split.known_ids.len() as f64;

    let stage = Staged::new(&run_dir(out, args.seed))?;
    stage.write_with("mappings.csv", |w| {
        Ok(write_mappings_csv(&outcome.state, w)?)
    })?;
    stage.write_json(
        "report.json",
        &AttackReport {
            seed: args.seed,
            knowledge: args.knowledge,
            config: cfg,
            imported_b: args.import_b.as_deref(),
            rounds: outcome.rounds,
            report: &report,
            trace: &outcome.trace,
        },
    )?;
    let dir = stage.promote()?;

    println!(
        "knowledge {:.2}%: alphabet {:.2}%, strings {:.2}%, initial paths {:.2}% after {} rounds; wrote {}",
        args.knowledge * 100.0,
        report.alphabet_rate * 100.0,
        report.string_rate * 100.0,
        report.initial_path_rate * 100.0,
        outcome.rounds,
        dir.display()
    );
    if report.false_positives > 0.0 {
        return Err(InvariantViolation(format!(
            "{} mappings disagree with the ground truth",
            report.false_positives
        ))
        .into());
    }
    Ok(())
}

/// Outcome of fitting one recovery curve: either the fit or why it failed.
#[derive(Serialize)]
#[serde(rename_all = "snake_case")]
enum FitResult {
    Fit(LogisticFit),
    Error(String),
}

fn fit(xs: &[f64], ys: &[f64]) -> FitResult {
    match fit_logistic(xs, ys) {
        Ok(f) => FitResult::Fit(f),
        Err(e) => FitResult::Error(e.to_string()),
    }
}

#[derive(Serialize)]
struct Fits {
    alphabet: FitResult,
    string: FitResult,
    initial_path: FitResult,
}

#[derive(Serialize)]
struct SweepSummary<'a> {
    mode: &'static str,
    strings: usize,
    alphabet_size: usize,
    seeds: &'a [u64],
    config: AttackConfig,
    known_count: Option<usize>,
    rows: &'a [RecoveryReport],
    fits: Option<Fits>,
}

pub fn sweep(out: &Path, args: &SweepArgs) -> Result<()> {
    let cfg = args.attack.config();
    let corpus = resolve_corpus(out, &args.input, args.mode == Mode::Knowledge)?;
    let (rows, fits, known_count) = match args.mode {
        Mode::Knowledge => {
            if !args.scales.is_empty() {
                bail!(UsageError("--scales only applies to --mode scale".into()));
            }
            let ratios = if args.ratios.is_empty() {
                DEFAULT_RATIOS.to_vec()
            } else {
                args.ratios.clone()
            };
            let rows = sweep_knowledge(&corpus, &ratios, &args.seeds, &cfg)?;
            let xs: Vec<f64> = rows.iter().map(|r| r.knowledge_ratio * 100.0).collect();
            let curve = |f: fn(&RecoveryReport) -> f64| rows.iter().map(f).collect::<Vec<_>>();
            let fits = Fits {
                alphabet: fit(&xs, &curve(|r| r.alphabet_rate)),
                string: fit(&xs, &curve(|r| r.string_rate)),
                initial_path: fit(&xs, &curve(|r| r.initial_path_rate)),
            };
            (rows, Some(fits), None)
        }
        Mode::Scale => {
            if !args.ratios.is_empty() {
                bail!(UsageError(
                    "--ratios only applies to --mode knowledge".into()
                ));
            }
            let scales = if args.scales.is_empty() {
                DEFAULT_SCALES.to_vec()
            } else {
                args.scales.clone()
            };
            let rows = sweep_scale(&corpus, &scales, args.known_count, &args.seeds, &cfg)?;
            (rows, None, Some(args.known_count))
        }
    };

    let stage = Staged::new(&out.join("sweeps").join(args.mode.name()))?;
    stage.write_with("table.csv", |w| {
        match args.mode {
            Mode::Knowledge => write_knowledge_table(&rows, w)?,
            Mode::Scale => write_scale_table(&rows, w)?,
        }
        Ok(())
    })?;
    stage.write_json(
        "summary.json",
        &SweepSummary {
            mode: args.mode.name(),
            strings: corpus.len(),
            alphabet_size: corpus.alphabet_len(),
            seeds: &args.seeds,
            config: cfg,
            known_count,
            rows: &rows,
            fits,
        },
    )?;
    let dir = stage.promote()?;

    for r in &rows {
        println!(
            "n={:<6} knowledge {:>6.2}%: alphabet {:>6.2}%, strings {:>6.2}%, initial paths {:>6.2}%",
            r.strings_total,
            r.knowledge_ratio * 100.0,
            r.alphabet_rate * 100.0,
            r.string_rate * 100.0,
            r.initial_path_rate * 100.0
        );
    }
    println!("wrote {}", dir.display());
    let wrong: f64 = rows.iter().map(|r| r.false_positives).sum();
    if wrong > 0.0 {
        return Err(
            InvariantViolation(format!("{wrong} mappings disagree with the ground truth")).into(),
        );
    }
    Ok(())
}
