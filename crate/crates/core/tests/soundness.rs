mod support;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ssleak_core::eval::sweep_knowledge;
use ssleak_core::{score, split_knowledge, AttackConfig, Scenario};
use support::gen::skewed_corpus;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn attack_output_is_always_correct(
        seed in any::<u64>(),
        n in 10usize..=120,
        m in 5usize..=94,
        max_len in 2usize..=24,
        ratio in 0.1f64..=0.9,
        zero_rows in any::<bool>(),
    ) {
        let corpus = skewed_corpus(&mut ChaCha8Rng::seed_from_u64(seed), n, m, max_len);
        let split = split_knowledge(&corpus, ratio, seed).unwrap();
        let sc = Scenario::build(&corpus, split, seed).unwrap();
        let cfg = AttackConfig { zero_matched_rows_in_step5: zero_rows, ..AttackConfig::default() };
        let out = sc.attack(&cfg).unwrap();
        prop_assert_eq!(out.state.false_positives(), Some((0, 0)));

        for w in out.trace.windows(2) {
            prop_assert!(w[0].strings <= w[1].strings && w[0].tokens <= w[1].tokens);
        }

        let r = score(&out.state, &corpus, &sc.key).unwrap();
        for rate in [r.alphabet_rate, r.string_rate, r.initial_path_rate, r.mapped_string_rate] {
            prop_assert!((0.0..=1.0).contains(&rate));
        }
        prop_assert!(r.initial_path_rate <= r.string_rate);
        prop_assert_eq!(r.alphabet_count as usize, out.state.tokens_mapped());
        prop_assert_eq!(r.mapped_string_count as usize, out.state.strings_mapped());
    }

    #[test]
    fn attack_is_deterministic(seed in any::<u64>(), ratio in 0.1f64..=0.9) {
        let corpus = skewed_corpus(&mut ChaCha8Rng::seed_from_u64(seed), 80, 30, 16);
        let run = || {
            let split = split_knowledge(&corpus, ratio, seed).unwrap();
            Scenario::build(&corpus, split, seed).unwrap().attack(&AttackConfig::default()).unwrap()
        };
        let (a, b) = (run(), run());
        prop_assert_eq!(a.state, b.state);
        prop_assert_eq!(a.trace, b.trace);
    }
}

#[test]
fn sweeps_do_not_depend_on_thread_count() {
    let corpus = skewed_corpus(&mut ChaCha8Rng::seed_from_u64(3), 400, 40, 20);
    let ratios = [0.1, 0.3, 0.6];
    let seeds = [1, 2, 3, 4];
    let cfg = AttackConfig::default();
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let a = single.install(|| sweep_knowledge(&corpus, &ratios, &seeds, &cfg).unwrap());
    let b = sweep_knowledge(&corpus, &ratios, &seeds, &cfg).unwrap();
    assert_eq!(a, b);
}

#[test]
fn mean_recovery_grows_with_knowledge() {
    let corpus = skewed_corpus(&mut ChaCha8Rng::seed_from_u64(11), 600, 60, 24);
    let ratios = [0.05, 0.1, 0.2, 0.4, 0.8];
    let seeds: Vec<u64> = (1..=20).collect();
    let r = sweep_knowledge(&corpus, &ratios, &seeds, &AttackConfig::default()).unwrap();
    for w in r.windows(2) {
        assert!(
            w[0].alphabet_rate <= w[1].alphabet_rate,
            "{:?}",
            (w[0].alphabet_rate, w[1].alphabet_rate)
        );
        assert!(w[0].string_rate <= w[1].string_rate);
        assert!(w[0].initial_path_rate <= w[1].initial_path_rate);
    }
}
