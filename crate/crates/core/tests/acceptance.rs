//! The acceptance gate: one test per shipping criterion.
//!
//! Each test is one criterion, named `criterion_NN_*` so `cargo test
//! --test acceptance` prints one pass/fail line per criterion. Run with
//! `-- --nocapture` to see the per-criterion evidence summaries. Every
//! expected value here is frozen independently of the code under test:
//! membership predicates parse strings arithmetically, subset sums are
//! enumerated over the pre-encoding integers, and counter machines are
//! simulated on plain integer counters.

use hva::analysis::{
    cross_check, enumerate_language, growth_audit, unary_dfa_extract, AnalysisOptions,
    CheckResult, Extraction,
};
use hva::counter::{
    compile_blind, Acceptance, CounterDef, CounterMachine, CounterTransitionDef,
};
use hva::gallery;
use hva::machine::{Guard, Hva, HvaDef, RunLimits, TransitionDef};
use hva::rational::Rational;
use hva::sb::{gsb_decode, gsb_encode, sb_decode, sb_encode, CodecError};
use hva::RVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

fn opts() -> AnalysisOptions {
    AnalysisOptions {
        limits: RunLimits::default(),
        jobs: 2,
    }
}

/// Every word over `k` 0-based symbols with length in `0..=maxlen`.
fn all_words(k: usize, maxlen: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..maxlen {
        let mut next = Vec::new();
        for w in &level {
            for j in 0..k {
                let mut t = w.clone();
                t.push(j);
                out.push(t.clone());
                next.push(t);
            }
        }
        level = next;
    }
    out
}

#[test]
fn criterion_01_gallery_machines_match_their_references_exhaustively() {
    // (entry, full-enumeration length cap) — each pair is an exhaustive
    // machine-vs-predicate comparison over every string up to the cap.
    let caps = [
        ("thm1_dim2", 14),
        ("thm1_dim1", 14),
        ("upow", 70),
        ("subsetsum_r", 12),
        ("mpal_2", 12),
        ("mpal_3", 9),
        ("pow", 14),
        ("pow_r", 14),
    ];
    let mut total: u64 = 0;
    for (name, maxlen) in caps {
        let entry = gallery::by_name(name).unwrap();
        let reference = |s: &str| (entry.reference)(s);
        match cross_check(&entry.machine, &reference, maxlen, &opts()).unwrap() {
            CheckResult::Pass { strings_checked } => total += strings_checked,
            CheckResult::Disagreement {
                input,
                machine_accepts,
                reference_accepts,
            } => panic!(
                "criterion 1: FAIL — {name} disagrees with its reference on {input:?} \
                 (machine {machine_accepts}, reference {reference_accepts})"
            ),
        }
    }
    // The two power-shaped languages additionally get targeted grids that
    // reach far beyond the exhaustive cap along their long axis.
    let limits = RunLimits::default();
    let pow = gallery::pow();
    for n in 0..=6usize {
        for m in 0..=64usize {
            let s = "a".repeat(n) + &"b".repeat(m);
            assert_eq!(
                pow.machine.run(&s, &limits).unwrap().accepted,
                (pow.reference)(&s),
                "criterion 1: FAIL — pow grid point a^{n} b^{m}"
            );
            total += 1;
        }
    }
    let pow_r = gallery::pow_r();
    for n in 0..=64usize {
        for m in 0..=6usize {
            let s = "a".repeat(n) + &"b".repeat(m);
            assert_eq!(
                pow_r.machine.run(&s, &limits).unwrap().accepted,
                (pow_r.reference)(&s),
                "criterion 1: FAIL — pow_r grid point a^{n} b^{m}"
            );
            total += 1;
        }
    }
    println!(
        "criterion 1: PASS — all 8 gallery machines match their reference predicates \
         on {total} strings, zero disagreements"
    );
}

#[test]
fn criterion_02_binary_encoding_table_matches_the_printed_vectors() {
    let table: [(&str, [i64; 2]); 10] = [
        ("0", [1, 2]),
        ("1", [2, 1]),
        ("00", [1, 3]),
        ("01", [3, 2]),
        ("10", [2, 3]),
        ("11", [3, 1]),
        ("000", [1, 4]),
        ("001", [4, 3]),
        ("010", [3, 5]),
        ("011", [5, 2]),
    ];
    for (word, pair) in table {
        let expected = RVector::from_i64(&pair);
        assert_eq!(
            sb_encode(word).unwrap(),
            expected,
            "criterion 2: FAIL — encoding of {word:?}"
        );
        assert_eq!(
            sb_decode(&expected).unwrap(),
            word,
            "criterion 2: FAIL — decoding of {pair:?}"
        );
    }
    println!("criterion 2: PASS — all 10 printed binary encodings reproduced exactly");
}

#[test]
fn criterion_03_generalized_encoding_is_injective_exhaustively() {
    let mut total = 0usize;
    for (k, maxlen) in [(2usize, 12usize), (3, 10), (4, 8)] {
        let mut seen: HashMap<RVector, Vec<usize>> = HashMap::new();
        for word in all_words(k, maxlen) {
            let v = gsb_encode(&word, k).unwrap();
            if let Some(prev) = seen.insert(v.clone(), word.clone()) {
                panic!(
                    "criterion 3: FAIL — k={k}: {prev:?} and {word:?} both encode to {v:?}"
                );
            }
        }
        total += seen.len();
    }
    println!(
        "criterion 3: PASS — {total} encodings across k=2 (len<=12), k=3 (len<=10), \
         k=4 (len<=8), all distinct"
    );
}

#[test]
fn criterion_04_round_trips_hold_and_off_table_vectors_are_rejected() {
    let mut probes_total = 0usize;
    for (k, maxlen) in [(2usize, 12usize), (3, 10), (4, 8)] {
        let mut table: HashMap<RVector, Vec<usize>> = HashMap::new();
        for word in all_words(k, maxlen) {
            let v = gsb_encode(&word, k).unwrap();
            assert_eq!(
                gsb_decode(&v, k).unwrap(),
                word,
                "criterion 4: FAIL — k={k} round trip of {word:?}"
            );
            table.insert(v, word);
        }
        // Random positive integer vectors outside the encoded set must be
        // rejected as invalid encodings. The exhaustive table identifies
        // the encoded set on the probe box only if no *longer* word's
        // encoding fits inside it. Each encoding step rewrites one entry
        // to the sum of all k, so the cheapest possible growth (hammering
        // one position while the other k-1 entries stay at 1) still puts
        // the maximum entry of any length-n encoding at 1 + n(k-1). The
        // cap 1 + (maxlen+1)(k-1) - 1 therefore excludes every encoding
        // longer than the table: 13 for k=2, 22 for k=3, 27 for k=4.
        let cap = (maxlen + 1) * (k - 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0xdec0de + k as u64);
        let mut probes = 0usize;
        while probes < 1000 {
            let entries: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=cap as i64)).collect();
            let v = RVector::from_i64(&entries);
            if table.contains_key(&v) {
                continue;
            }
            probes += 1;
            match gsb_decode(&v, k) {
                Err(CodecError::InvalidEncoding(_)) => {}
                other => panic!(
                    "criterion 4: FAIL — k={k}: off-table vector {entries:?} \
                     was not rejected as an invalid encoding: {other:?}"
                ),
            }
        }
        probes_total += probes;
    }
    println!(
        "criterion 4: PASS — decode∘encode is the identity on all exhaustive ranges; \
         {probes_total} off-table probes all rejected as invalid encodings"
    );
}

/// Seeded generator of structurally valid blind counter machines with at
/// most 3 counters, 3 states, and 2 symbols.
fn random_blind_counter(rng: &mut ChaCha8Rng, index: usize) -> CounterDef {
    let counters = rng.gen_range(1..=3usize);
    let n_states = rng.gen_range(1..=3usize);
    let n_symbols = rng.gen_range(1..=2usize);
    let states: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
    let alphabet: Vec<String> = ["a", "b"][..n_symbols].iter().map(|s| s.to_string()).collect();
    let mut transitions = Vec::new();
    for from in &states {
        for symbol in &alphabet {
            // Leave some transitions missing so runs can die.
            if rng.gen_bool(0.85) {
                transitions.push(CounterTransitionDef {
                    from: from.clone(),
                    symbol: symbol.clone(),
                    zero_pattern: None,
                    to: states[rng.gen_range(0..n_states)].clone(),
                    increments: (0..counters).map(|_| rng.gen_range(-1..=1i64)).collect(),
                });
            }
        }
    }
    let accept_states: Vec<String> = states
        .iter()
        .filter(|_| rng.gen_bool(0.5))
        .cloned()
        .collect();
    CounterDef {
        name: format!("seeded_{index}"),
        counters,
        blind: true,
        acceptance: Acceptance::StateAndZero,
        alphabet,
        states: states.clone(),
        initial_state: states[0].clone(),
        accept_states,
        transitions,
    }
}

/// Every string over the given symbols up to `maxlen`, shortest first.
fn all_strings(alphabet: &[String], maxlen: usize) -> Vec<String> {
    let mut out = vec![String::new()];
    let mut level = vec![String::new()];
    for _ in 0..maxlen {
        let mut next = Vec::new();
        for s in &level {
            for sym in alphabet {
                let mut t = s.clone();
                t.push_str(sym);
                out.push(t.clone());
                next.push(t);
            }
        }
        level = next;
    }
    out
}

#[test]
fn criterion_05_compiled_blind_counter_machines_track_their_counters() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xc047);
    let limits = RunLimits::default();
    let mut machines = 0usize;
    let mut runs = 0usize;
    for index in 0..50 {
        let def = random_blind_counter(&mut rng, index);
        let cm = CounterMachine::try_from(def).expect("generated definitions are valid");
        let compiled: Hva = compile_blind(&cm)
            .expect("blind machines compile")
            .try_into()
            .expect("compiled definitions validate");
        let k = cm.counters();
        for input in all_strings(cm.alphabet(), 10) {
            let counter_run = cm.run(&input).unwrap();
            let vector_run = compiled.run(&input, &limits).unwrap();
            assert_eq!(
                vector_run.accepted, counter_run.accepted,
                "criterion 5: FAIL — machine {} disagrees on {input:?}",
                cm.name()
            );
            // Trace correspondence: while the counter run is alive, the
            // compiled machine holds exactly [1+c_1, ..., 1+c_k, 1] in the
            // counter run's state; after death both are dead.
            let trace = compiled.trace(&input, &limits).unwrap();
            for (step, cfg) in counter_run.trajectory.iter().enumerate() {
                assert_eq!(trace[step].len(), 1, "criterion 5: FAIL — set size");
                let got = &trace[step][0];
                assert_eq!(
                    got.state, cfg.state,
                    "criterion 5: FAIL — state at step {step} of {input:?}"
                );
                let expected: Vec<Rational> = cfg
                    .counters
                    .iter()
                    .map(|&c| Rational::from(1 + c))
                    .chain(std::iter::once(Rational::one()))
                    .collect();
                assert_eq!(
                    got.vector.entries(),
                    &expected[..],
                    "criterion 5: FAIL — vector at step {step} of {input:?} \
                     does not equal [1+c_1, ..., 1+c_{k}, 1]"
                );
            }
            for dead_set in &trace[counter_run.trajectory.len()..] {
                assert!(
                    dead_set.is_empty(),
                    "criterion 5: FAIL — compiled machine alive after counter death"
                );
            }
            runs += 1;
        }
        machines += 1;
    }
    println!(
        "criterion 5: PASS — {machines} seeded blind counter machines, {runs} inputs: \
         compiled acceptance and step-by-step vectors match direct counter simulation"
    );
}

#[test]
fn criterion_06_growth_audits_report_zero_bound_violations() {
    let mut audited = 0usize;
    for entry in gallery::all() {
        let report = growth_audit(&entry.machine, 12, &opts())
            .unwrap_or_else(|e| panic!("criterion 6: FAIL — {}: {e}", entry.name));
        assert!(
            report.entry_premise,
            "criterion 6: FAIL — {} should satisfy the initial-entry premise",
            entry.name
        );
        audited += 1;
    }
    // The same seeded compiled machines as criterion 5.
    let mut rng = ChaCha8Rng::seed_from_u64(0xc047);
    for index in 0..50 {
        let def = random_blind_counter(&mut rng, index);
        let cm = CounterMachine::try_from(def).unwrap();
        let compiled: Hva = compile_blind(&cm).unwrap().try_into().unwrap();
        growth_audit(&compiled, 12, &opts())
            .unwrap_or_else(|e| panic!("criterion 6: FAIL — seeded_{index}_hva: {e}"));
        audited += 1;
    }
    println!(
        "criterion 6: PASS — {audited} machines audited to length 12, \
         every observed entry within m^(n+1)*k^n"
    );
}

/// A unary machine from (dimension, matrix, initial vector, state chain):
/// states form a chain with `loops` sending the last state back.
fn unary_chain(
    name: &str,
    states: usize,
    accepting: &[usize],
    loop_to: usize,
    matrix: Vec<Vec<Rational>>,
    initial: Vec<Rational>,
) -> Hva {
    let names: Vec<String> = (0..states).map(|i| format!("q{i}")).collect();
    let mut transitions: Vec<TransitionDef> = (0..states - 1)
        .map(|i| TransitionDef {
            from: names[i].clone(),
            symbol: "a".into(),
            guard: Guard::Any,
            to: names[i + 1].clone(),
            matrix: matrix.clone(),
        })
        .collect();
    transitions.push(TransitionDef {
        from: names[states - 1].clone(),
        symbol: "a".into(),
        guard: Guard::Any,
        to: names[loop_to].clone(),
        matrix: matrix.clone(),
    });
    HvaDef {
        name: name.into(),
        dimension: initial.len(),
        alphabet: vec!["a".into()],
        states: names.clone(),
        initial_state: names[0].clone(),
        accept_states: accepting.iter().map(|&i| names[i].clone()).collect(),
        deterministic: true,
        blind: true,
        initial_vector: initial,
        transitions,
    }
    .try_into()
    .unwrap()
}

#[test]
fn criterion_07_unary_dfa_extraction_agrees_with_simulation_to_200() {
    let one = || vec![vec![Rational::one()]];
    let machines: Vec<(&str, Hva)> = vec![
        // Alternating sign: home exactly at even lengths.
        (
            "even_lengths",
            unary_chain(
                "even_lengths",
                1,
                &[0],
                0,
                vec![vec![Rational::from(-1)]],
                vec![Rational::one()],
            ),
        ),
        // Identity everywhere: accepts every length.
        (
            "everything",
            unary_chain("everything", 1, &[0], 0, one(), vec![Rational::one()]),
        ),
        // Cyclic permutation of [1, 2, 3]: home at multiples of 3.
        (
            "multiples_of_three",
            unary_chain(
                "multiples_of_three",
                1,
                &[0],
                0,
                vec![
                    vec![Rational::zero(), Rational::one(), Rational::zero()],
                    vec![Rational::zero(), Rational::zero(), Rational::one()],
                    vec![Rational::one(), Rational::zero(), Rational::zero()],
                ],
                vec![Rational::from(1), Rational::from(2), Rational::from(3)],
            ),
        ),
        // Chain into a 2-loop: accepts odd lengths >= 3.
        (
            "odd_from_three",
            unary_chain("odd_from_three", 5, &[3], 3, one(), vec![Rational::one()]),
        ),
        // Chain into a 2-loop: accepts {1} and the evens >= 4.
        (
            "one_or_even_from_four",
            unary_chain(
                "one_or_even_from_four",
                6,
                &[1, 4],
                4,
                one(),
                vec![Rational::one()],
            ),
        ),
    ];
    let limits = RunLimits::default();
    let mut states_total = 0usize;
    for (name, machine) in &machines {
        let Extraction::Dfa(dfa) = unary_dfa_extract(machine, 120).unwrap() else {
            panic!("criterion 7: FAIL — {name}: no DFA within budget");
        };
        for len in 0..=200usize {
            let direct = machine.run(&"a".repeat(len), &limits).unwrap().accepted;
            assert_eq!(
                dfa.accepts_length(len),
                direct,
                "criterion 7: FAIL — {name} at length {len}"
            );
        }
        states_total += dfa.state_count();
    }
    println!(
        "criterion 7: PASS — 5 extracted DFAs ({states_total} states total) agree with \
         direct simulation on every length <= 200"
    );
}

#[test]
fn criterion_08_upow_accepted_lengths_to_70() {
    let upow = gallery::upow();
    let words = enumerate_language(&upow.machine, 70, &opts()).unwrap();
    let lengths: Vec<usize> = words.iter().map(|w| w.len()).collect();
    assert_eq!(
        lengths,
        vec![3, 6, 11, 20, 37, 70],
        "criterion 8: FAIL — accepted unary lengths"
    );
    println!("criterion 8: PASS — accepted lengths up to 70 are exactly {{3, 6, 11, 20, 37, 70}}");
}

#[test]
fn criterion_09_every_single_entry_mutation_is_caught_within_14() {
    let base = gallery::thm1_dim2().machine.def().clone();
    let mut caught = 0usize;
    let mut tried = 0usize;
    for t_idx in 0..base.transitions.len() {
        for row in 0..2 {
            for col in 0..2 {
                for delta in [1i64, -1] {
                    let mut def = base.clone();
                    def.name = format!("thm1_dim2_t{t_idx}_r{row}_c{col}_{delta:+}");
                    let entry = &mut def.transitions[t_idx].matrix[row][col];
                    *entry = &*entry + &Rational::from(delta);
                    let mutated: Hva = def.try_into().unwrap();
                    tried += 1;
                    match cross_check(&mutated, &gallery::thm1_member, 14, &opts()).unwrap() {
                        CheckResult::Disagreement { .. } => caught += 1,
                        CheckResult::Pass { .. } => panic!(
                            "criterion 9: FAIL — mutation of transition {t_idx} entry \
                             ({row},{col}) by {delta:+} passes the cross-check to length 14"
                        ),
                    }
                }
            }
        }
    }
    assert_eq!(tried, 56);
    assert!(caught >= 10);
    println!(
        "criterion 9: PASS — all {caught}/{tried} single-entry ±1 mutations produce a \
         disagreement within length 14"
    );
}

/// Least-significant-bit-first binary text of `v` (nonempty; 0 is "0").
fn lsb_binary(v: u32) -> String {
    if v == 0 {
        return "0".into();
    }
    let mut s = String::new();
    let mut v = v;
    while v > 0 {
        s.push(if v & 1 == 1 { '1' } else { '0' });
        v >>= 1;
    }
    s
}

#[test]
fn criterion_10_seeded_subset_sum_instances_match_brute_force() {
    let entry = gallery::subsetsum_r();
    let limits = RunLimits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5b5e7);
    let mut accepted = 0usize;
    let mut max_set = 0usize;
    let states = entry.machine.def().states.len();
    for _ in 0..200 {
        let t: u32 = rng.gen_range(0..=31);
        let count = rng.gen_range(1..=4usize);
        let numbers: Vec<u32> = (0..count).map(|_| rng.gen_range(0..=31)).collect();
        let mut input = lsb_binary(t);
        input.push('#');
        for n in &numbers {
            input.push_str(&lsb_binary(*n));
            input.push('#');
        }
        // Brute force over the pre-encoding integers.
        let expected = (0u32..1 << count).any(|mask| {
            numbers
                .iter()
                .enumerate()
                .filter(|&(i, _)| mask >> i & 1 == 1)
                .map(|(_, &n)| n)
                .sum::<u32>()
                == t
        });
        let run = entry.machine.run(&input, &limits).unwrap();
        assert_eq!(
            run.accepted, expected,
            "criterion 10: FAIL — t={t}, numbers={numbers:?}, input {input:?}"
        );
        // The reference predicate is a second, string-level oracle.
        assert_eq!(
            (entry.reference)(&input),
            expected,
            "criterion 10: FAIL — reference predicate on {input:?}"
        );
        max_set = max_set.max(run.stats.max_config_set);
        accepted += usize::from(expected);
    }
    assert!(
        max_set <= 16 * states,
        "criterion 10: FAIL — configuration sets reached {max_set}, over 2^4 * |Q| = {}",
        16 * states
    );
    println!(
        "criterion 10: PASS — 200 seeded instances ({accepted} positive) match brute force; \
         largest configuration set {max_set} <= {}",
        16 * states
    );
}
