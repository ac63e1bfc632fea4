//! An independent simulator cross-checked against the engine.
//!
//! The oracle here runs machines straight off the definition struct:
//! string-keyed state lookups, a hand-rolled vector-times-matrix loop, and
//! plain branching recursion with no configuration sets, deduplication,
//! compiled tables, or shared code with the engine. Agreement between the
//! two (plus the language enumerator as a third voice) on both the curated
//! machines and a seeded pile of random nondeterministic ones is evidence
//! that neither implementation quietly depends on its own shortcuts.

use hva::analysis::{enumerate_language, AnalysisOptions};
use hva::gallery;
use hva::machine::{Guard, Hva, HvaDef, RunLimits, TransitionDef};
use hva::rational::{rat, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Row vector times matrix, written out longhand.
fn vec_times_matrix(v: &[Rational], m: &[Vec<Rational>]) -> Vec<Rational> {
    let k = v.len();
    let mut out = vec![Rational::zero(); k];
    for (j, slot) in out.iter_mut().enumerate() {
        for (i, vi) in v.iter().enumerate() {
            *slot = &*slot + &(vi * &m[i][j]);
        }
    }
    out
}

/// One nondeterministic branch: true if any continuation accepts.
fn branch(def: &HvaDef, state: &str, vector: &[Rational], rest: &[usize]) -> bool {
    let Some((&first, tail)) = rest.split_first() else {
        return def.accept_states.iter().any(|s| s == state)
            && vector == &def.initial_vector[..];
    };
    let symbol = &def.alphabet[first];
    let at_home = vector == &def.initial_vector[..];
    def.transitions
        .iter()
        .filter(|tr| tr.from == state && &tr.symbol == symbol)
        .filter(|tr| match tr.guard {
            Guard::Any => true,
            Guard::Eq => at_home,
            Guard::Neq => !at_home,
        })
        .any(|tr| branch(def, &tr.to, &vec_times_matrix(vector, &tr.matrix), tail))
}

/// Acceptance by recursive branching over the raw definition.
fn oracle_accepts(def: &HvaDef, input: &str) -> bool {
    let symbols: Vec<usize> = input
        .chars()
        .map(|c| {
            def.alphabet
                .iter()
                .position(|s| s.as_str() == c.to_string())
                .expect("test inputs use the machine's alphabet")
        })
        .collect();
    branch(def, &def.initial_state, &def.initial_vector, &symbols)
}

/// Every string over the alphabet up to `maxlen`, shortest first, and
/// within each length in alphabet order (the enumerator's order).
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

/// Runs the three-way comparison on one machine: recursive oracle,
/// configuration-set engine, and trie enumerator must all agree.
fn triple_check(machine: &Hva, maxlen: usize, context: &str) {
    let def = machine.def();
    let limits = RunLimits::default();
    let mut oracle_language = Vec::new();
    for input in all_strings(&def.alphabet, maxlen) {
        let from_oracle = oracle_accepts(def, &input);
        let from_engine = machine.run(&input, &limits).unwrap().accepted;
        assert_eq!(
            from_oracle, from_engine,
            "{context}: oracle and engine disagree on {input:?}"
        );
        if from_oracle {
            oracle_language.push(input);
        }
    }
    let enumerated = enumerate_language(machine, maxlen, &AnalysisOptions::default()).unwrap();
    assert_eq!(
        enumerated, oracle_language,
        "{context}: enumerator disagrees with the oracle language"
    );
}

#[test]
fn oracle_agrees_with_engine_on_gallery_machines() {
    // Length caps keep the no-dedup recursion cheap on wide alphabets.
    let caps = [
        ("thm1_dim2", 7),
        ("thm1_dim1", 7),
        ("upow", 7),
        ("subsetsum_r", 7),
        ("mpal_2", 7),
        ("mpal_3", 6),
        ("pow", 7),
        ("pow_r", 7),
    ];
    for (name, maxlen) in caps {
        let entry = gallery::by_name(name).unwrap();
        triple_check(&entry.machine, maxlen, name);
    }
}

/// A structurally valid random machine: 1-2 dimensions, up to 3 states,
/// up to 2 symbols, nondeterministic and non-blind, with small rational
/// entries (denominators 1 or 2) and some missing transitions.
fn random_machine(rng: &mut ChaCha8Rng, index: usize) -> HvaDef {
    let dimension = rng.gen_range(1..=2usize);
    let n_states = rng.gen_range(1..=3usize);
    let n_symbols = rng.gen_range(1..=2usize);
    let states: Vec<String> = (0..n_states).map(|i| format!("s{i}")).collect();
    let alphabet: Vec<String> = ["a", "b"][..n_symbols].iter().map(|s| s.to_string()).collect();
    let entry = |rng: &mut ChaCha8Rng| {
        let numer = rng.gen_range(-2..=2i64);
        if rng.gen_bool(0.25) {
            rat(numer, 2).unwrap()
        } else {
            Rational::from(numer)
        }
    };
    let mut transitions = Vec::new();
    for from in 0..n_states {
        for symbol in &alphabet {
            for _ in 0..rng.gen_range(0..=2usize) {
                let guard = match rng.gen_range(0..3u8) {
                    0 => Guard::Any,
                    1 => Guard::Eq,
                    _ => Guard::Neq,
                };
                transitions.push(TransitionDef {
                    from: states[from].clone(),
                    symbol: symbol.clone(),
                    guard,
                    to: states[rng.gen_range(0..n_states)].clone(),
                    matrix: (0..dimension)
                        .map(|_| (0..dimension).map(|_| entry(rng)).collect())
                        .collect(),
                });
            }
        }
    }
    HvaDef {
        name: format!("seeded_{index}"),
        dimension,
        alphabet,
        states: states.clone(),
        initial_state: states[0].clone(),
        accept_states: states.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect(),
        deterministic: false,
        blind: false,
        initial_vector: (0..dimension).map(|_| entry(rng)).collect(),
        transitions,
    }
}

#[test]
fn oracle_agrees_with_engine_on_seeded_machines() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0bac1e);
    for index in 0..30 {
        let def = random_machine(&mut rng, index);
        let name = def.name.clone();
        let machine: Hva = def.try_into().unwrap_or_else(|e| panic!("{name}: {e}"));
        triple_check(&machine, 6, &name);
    }
}
