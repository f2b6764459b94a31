use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use ssleak_bench::corpus;
use ssleak_core::{
    build_cooccurrence, build_suffix_tree, encrypt_corpus, gen_key, reduce_to_incidence,
    split_knowledge, AttackConfig, Scenario,
};

fn index(c: &mut Criterion) {
    let mut group = c.benchmark_group("index");
    for n in [500, 2000] {
        let corpus = corpus(n);
        let key = gen_key(corpus.alphabet(), 1).unwrap();
        let enc = encrypt_corpus(&corpus, &key, 1).unwrap();
        group.throughput(Throughput::Elements(n as u64));
        group.bench_with_input(BenchmarkId::new("suffix_tree", n), &enc, |b, enc| {
            b.iter(|| build_suffix_tree(&enc.ciphertexts))
        });
        group.bench_with_input(BenchmarkId::new("incidence", n), &enc, |b, enc| {
            b.iter(|| reduce_to_incidence(&enc.ciphertexts, &key.tokens()).unwrap())
        });
    }
    group.finish();
}

fn cooccurrence(c: &mut Criterion) {
    let corpus = corpus(5000);
    let key = gen_key(corpus.alphabet(), 1).unwrap();
    let enc = encrypt_corpus(&corpus, &key, 1).unwrap();
    let b = reduce_to_incidence(&enc.ciphertexts, &key.tokens()).unwrap();
    c.bench_function("cooccurrence/5000", |bench| {
        bench.iter(|| {
            let m = build_cooccurrence(&b);
            m.get(0, 1)
        })
    });
}

fn attack(c: &mut Criterion) {
    let mut group = c.benchmark_group("attack");
    group.sample_size(20);
    let corpus = corpus(5000);
    for ratio in [0.1, 0.6] {
        group.bench_with_input(BenchmarkId::new("n5000", ratio), &ratio, |b, &ratio| {
            b.iter_batched(
                || {
                    Scenario::build(&corpus, split_knowledge(&corpus, ratio, 1).unwrap(), 1)
                        .unwrap()
                },
                |sc| {
                    sc.attack(&AttackConfig::default())
                        .unwrap()
                        .state
                        .strings_mapped()
                },
                BatchSize::LargeInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, index, cooccurrence, attack);
criterion_main!(benches);
