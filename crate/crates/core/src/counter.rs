//! Real-time deterministic counter machines and their compilation into
//! homing vector automata.
//!
//! A counter machine has k integer counters, all starting at 0, updated by
//! an increment in {-1, 0, +1} per counter per input symbol. Two flavors:
//!
//! * **blind**: transitions never look at the counters; acceptance requires
//!   an accept state *and* all counters back at 0 (`state_and_zero`).
//! * **zero-testing** (non-blind): every transition carries a zero-pattern,
//!   one `eq`/`neq` test per counter, read against the current counter
//!   values *before* the increments apply. The acceptance flag chooses
//!   between accept-state-only (`state`) and `state_and_zero`.
//!
//! Both flavors are deterministic: at most one transition per lookup key
//! ((state, symbol) when blind; (state, symbol, pattern) otherwise — full
//! patterns are mutually exclusive, so distinct patterns never clash).
//! A missing transition kills the run.
//!
//! Compilations (both produce definitions that pass machine validation):
//!
//! * [`compile_blind`]: blind k-counter machine → blind deterministic
//!   (k+1)-dimensional vector machine. Each transition's matrix is the
//!   identity with its last row's first k entries set to the increments, so
//!   the vector tracks [1+c_1, ..., 1+c_k, 1] and is home exactly when all
//!   counters are 0.
//! * [`compile_one_counter`]: zero-testing 1-counter machine with
//!   `state_and_zero` acceptance → non-blind deterministic 2-dimensional
//!   vector machine. The vector tracks [1+c, 1]; `eq`/`neq` become the
//!   vector-at-home guards, and increments become the add/subtract/identity
//!   matrices. Machines with two or more zero-testing counters have no such
//!   translation: the vector machine can only test its whole vector against
//!   home, never one entry alone.
//!
//! The JSON file format mirrors the vector-machine format:
//! `{name, counters, blind, acceptance, alphabet, states, initial_state,
//! accept_states, transitions}` with each transition
//! `{from, symbol, zero_pattern?, to, increments}`.

use crate::machine::{Guard, HvaDef, TransitionDef};
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// One per-counter zero test in a transition's pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroTest {
    /// Fires only when the counter is exactly 0.
    Eq,
    /// Fires only when the counter is nonzero.
    Neq,
}

impl ZeroTest {
    fn matches(self, value: i64) -> bool {
        match self {
            ZeroTest::Eq => value == 0,
            ZeroTest::Neq => value != 0,
        }
    }
}

impl std::fmt::Display for ZeroTest {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ZeroTest::Eq => "eq",
            ZeroTest::Neq => "neq",
        })
    }
}

/// End-of-input acceptance convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Acceptance {
    /// Accept state alone suffices.
    State,
    /// Accept state and every counter equal to 0.
    StateAndZero,
}

/// One transition in the file format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterTransitionDef {
    pub from: String,
    pub symbol: String,
    /// Required (length k) on zero-testing machines; absent on blind ones.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_pattern: Option<Vec<ZeroTest>>,
    pub to: String,
    /// One increment per counter, each in {-1, 0, +1}.
    pub increments: Vec<i64>,
}

/// A counter machine definition as read from or written to a file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CounterDef {
    pub name: String,
    /// Number of counters, k ≥ 1.
    pub counters: usize,
    pub blind: bool,
    pub acceptance: Acceptance,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial_state: String,
    pub accept_states: Vec<String>,
    pub transitions: Vec<CounterTransitionDef>,
}

/// A single validation failure; a definition reports all of them at once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CounterViolation {
    ZeroCounters,
    EmptyAlphabet,
    EmptyStates,
    EmptySymbol,
    DuplicateSymbol { symbol: String },
    DuplicateState { state: String },
    UnknownInitialState { state: String },
    UnknownAcceptState { state: String },
    /// Blind machines must accept by `state_and_zero`; counters they never
    /// read mid-run are only ever visible at the end.
    BlindStateAcceptance,
    UnknownFromState { transition: usize, state: String },
    UnknownToState { transition: usize, state: String },
    UnknownSymbol { transition: usize, symbol: String },
    IncrementsLength { transition: usize, expected: usize, found: usize },
    IncrementOutOfRange { transition: usize, value: i64 },
    /// A blind machine's transition carries a zero-pattern.
    BlindPattern { transition: usize },
    /// A zero-testing machine's transition lacks its pattern.
    MissingPattern { transition: usize },
    PatternLength { transition: usize, expected: usize, found: usize },
    /// Two transitions share a lookup key.
    Nondeterministic { state: String, symbol: String },
}

impl std::fmt::Display for CounterViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        use CounterViolation::*;
        match self {
            ZeroCounters => write!(f, "counters must be at least 1"),
            EmptyAlphabet => write!(f, "alphabet is empty"),
            EmptyStates => write!(f, "state list is empty"),
            EmptySymbol => write!(f, "alphabet contains an empty symbol"),
            DuplicateSymbol { symbol } => write!(f, "duplicate alphabet symbol {symbol:?}"),
            DuplicateState { state } => write!(f, "duplicate state {state:?}"),
            UnknownInitialState { state } => write!(f, "initial state {state:?} is not a state"),
            UnknownAcceptState { state } => write!(f, "accept state {state:?} is not a state"),
            BlindStateAcceptance => {
                write!(f, "blind machines must use acceptance \"state_and_zero\"")
            }
            UnknownFromState { transition, state } => {
                write!(f, "transition {transition}: unknown from-state {state:?}")
            }
            UnknownToState { transition, state } => {
                write!(f, "transition {transition}: unknown to-state {state:?}")
            }
            UnknownSymbol { transition, symbol } => {
                write!(f, "transition {transition}: unknown symbol {symbol:?}")
            }
            IncrementsLength { transition, expected, found } => write!(
                f,
                "transition {transition}: expected {expected} increments, found {found}"
            ),
            IncrementOutOfRange { transition, value } => write!(
                f,
                "transition {transition}: increment {value} outside -1..=1"
            ),
            BlindPattern { transition } => write!(
                f,
                "transition {transition}: blind machines cannot carry zero patterns"
            ),
            MissingPattern { transition } => write!(
                f,
                "transition {transition}: zero-testing machines need a zero_pattern"
            ),
            PatternLength { transition, expected, found } => write!(
                f,
                "transition {transition}: expected {expected} pattern entries, found {found}"
            ),
            Nondeterministic { state, symbol } => write!(
                f,
                "state {state:?} on symbol {symbol:?} has conflicting transitions"
            ),
        }
    }
}

/// Validation failure carrying every violation found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidCounterMachine(pub Vec<CounterViolation>);

impl std::fmt::Display for InvalidCounterMachine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid counter machine:")?;
        for v in &self.0 {
            write!(f, "\n  - {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for InvalidCounterMachine {}

impl CounterDef {
    /// Every violation in the definition, empty when valid.
    pub fn validate(&self) -> Vec<CounterViolation> {
        use CounterViolation::*;
        let mut out = Vec::new();
        if self.counters == 0 {
            out.push(ZeroCounters);
        }
        if self.alphabet.is_empty() {
            out.push(EmptyAlphabet);
        }
        if self.states.is_empty() {
            out.push(EmptyStates);
        }
        let mut symbols = HashMap::new();
        for s in &self.alphabet {
            if s.is_empty() {
                out.push(EmptySymbol);
            }
            if symbols.insert(s.clone(), ()).is_some() {
                out.push(DuplicateSymbol { symbol: s.clone() });
            }
        }
        let mut states = HashMap::new();
        for s in &self.states {
            if states.insert(s.clone(), ()).is_some() {
                out.push(DuplicateState { state: s.clone() });
            }
        }
        if !states.contains_key(&self.initial_state) {
            out.push(UnknownInitialState {
                state: self.initial_state.clone(),
            });
        }
        for s in &self.accept_states {
            if !states.contains_key(s) {
                out.push(UnknownAcceptState { state: s.clone() });
            }
        }
        if self.blind && self.acceptance == Acceptance::State {
            out.push(BlindStateAcceptance);
        }
        // Lookup keys: (state, symbol) plus the pattern when present.
        let mut keys: HashMap<(&str, &str, Option<&[ZeroTest]>), u32> = HashMap::new();
        let mut clashed: Vec<(&str, &str)> = Vec::new();
        for (i, tr) in self.transitions.iter().enumerate() {
            if !states.contains_key(&tr.from) {
                out.push(UnknownFromState {
                    transition: i,
                    state: tr.from.clone(),
                });
            }
            if !states.contains_key(&tr.to) {
                out.push(UnknownToState {
                    transition: i,
                    state: tr.to.clone(),
                });
            }
            if !symbols.contains_key(&tr.symbol) {
                out.push(UnknownSymbol {
                    transition: i,
                    symbol: tr.symbol.clone(),
                });
            }
            if tr.increments.len() != self.counters {
                out.push(IncrementsLength {
                    transition: i,
                    expected: self.counters,
                    found: tr.increments.len(),
                });
            }
            for &c in &tr.increments {
                if !(-1..=1).contains(&c) {
                    out.push(IncrementOutOfRange {
                        transition: i,
                        value: c,
                    });
                }
            }
            match (&tr.zero_pattern, self.blind) {
                (Some(_), true) => out.push(BlindPattern { transition: i }),
                (None, false) => out.push(MissingPattern { transition: i }),
                (Some(p), false) if p.len() != self.counters => out.push(PatternLength {
                    transition: i,
                    expected: self.counters,
                    found: p.len(),
                }),
                _ => {}
            }
            // Blind machines never read patterns, so a pattern (itself a
            // violation above) must not split an otherwise clashing key.
            let key = (
                tr.from.as_str(),
                tr.symbol.as_str(),
                if self.blind { None } else { tr.zero_pattern.as_deref() },
            );
            let count = keys.entry(key).or_insert(0);
            *count += 1;
            if *count == 2 {
                clashed.push((tr.from.as_str(), tr.symbol.as_str()));
            }
        }
        clashed.sort();
        clashed.dedup();
        for (state, symbol) in clashed {
            out.push(Nondeterministic {
                state: state.to_owned(),
                symbol: symbol.to_owned(),
            });
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("counter definitions serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}

/// A state-plus-counter-values snapshot during a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterConfig {
    pub state: usize,
    pub counters: Vec<i64>,
}

/// The result of running a counter machine on an input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CounterRun {
    pub accepted: bool,
    /// One snapshot per consumed prefix while alive, starting with the
    /// initial configuration.
    pub trajectory: Vec<CounterConfig>,
    /// `Some(i)` if no transition matched the symbol at 0-based position i.
    pub dead_at: Option<usize>,
}

/// Input rejected before simulation starts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CounterRunError {
    UnknownSymbol { position: usize, symbol: String },
}

impl std::fmt::Display for CounterRunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CounterRunError::UnknownSymbol { position, symbol } => {
                write!(f, "symbol {symbol:?} at position {position} is not in the alphabet")
            }
        }
    }
}

impl std::error::Error for CounterRunError {}

#[derive(Clone, Debug)]
struct CompiledCounterTransition {
    pattern: Option<Vec<ZeroTest>>,
    to: usize,
    increments: Vec<i64>,
}

/// A validated counter machine ready to run.
#[derive(Clone, Debug)]
pub struct CounterMachine {
    def: CounterDef,
    symbol_index: HashMap<String, usize>,
    initial_state: usize,
    accepting: Vec<bool>,
    /// `table[state][symbol]` lists candidate transitions; patterns are
    /// mutually exclusive, so at most one matches any counter valuation.
    table: Vec<Vec<Vec<CompiledCounterTransition>>>,
}

impl TryFrom<CounterDef> for CounterMachine {
    type Error = InvalidCounterMachine;

    fn try_from(def: CounterDef) -> Result<Self, Self::Error> {
        let violations = def.validate();
        if !violations.is_empty() {
            return Err(InvalidCounterMachine(violations));
        }
        let state_index: HashMap<String, usize> = def
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let symbol_index: HashMap<String, usize> = def
            .alphabet
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let mut accepting = vec![false; def.states.len()];
        for s in &def.accept_states {
            accepting[state_index[s]] = true;
        }
        let mut table = vec![vec![Vec::new(); def.alphabet.len()]; def.states.len()];
        for tr in &def.transitions {
            table[state_index[&tr.from]][symbol_index[&tr.symbol]].push(
                CompiledCounterTransition {
                    pattern: tr.zero_pattern.clone(),
                    to: state_index[&tr.to],
                    increments: tr.increments.clone(),
                },
            );
        }
        let initial_state = state_index[&def.initial_state];
        Ok(CounterMachine {
            def,
            symbol_index,
            initial_state,
            accepting,
            table,
        })
    }
}

impl CounterMachine {
    pub fn name(&self) -> &str {
        &self.def.name
    }

    pub fn counters(&self) -> usize {
        self.def.counters
    }

    pub fn is_blind(&self) -> bool {
        self.def.blind
    }

    pub fn acceptance(&self) -> Acceptance {
        self.def.acceptance
    }

    pub fn alphabet(&self) -> &[String] {
        &self.def.alphabet
    }

    pub fn state_name(&self, state: usize) -> &str {
        &self.def.states[state]
    }

    pub fn def(&self) -> &CounterDef {
        &self.def
    }

    /// Splits an input into alphabet symbols, one character each.
    fn tokenize(&self, input: &str) -> Result<Vec<usize>, CounterRunError> {
        input
            .chars()
            .enumerate()
            .map(|(position, c)| {
                self.symbol_index.get(c.to_string().as_str()).copied().ok_or(
                    CounterRunError::UnknownSymbol {
                        position,
                        symbol: c.to_string(),
                    },
                )
            })
            .collect()
    }

    fn accepts_config(&self, config: &CounterConfig) -> bool {
        self.accepting[config.state]
            && match self.def.acceptance {
                Acceptance::State => true,
                Acceptance::StateAndZero => config.counters.iter().all(|&c| c == 0),
            }
    }

    /// Runs the machine, recording the configuration after every prefix.
    pub fn run(&self, input: &str) -> Result<CounterRun, CounterRunError> {
        let symbols = self.tokenize(input)?;
        let mut config = CounterConfig {
            state: self.initial_state,
            counters: vec![0; self.def.counters],
        };
        let mut trajectory = vec![config.clone()];
        for (i, &sym) in symbols.iter().enumerate() {
            let next = self.table[config.state][sym].iter().find(|tr| {
                tr.pattern.as_ref().is_none_or(|p| {
                    p.iter()
                        .zip(&config.counters)
                        .all(|(test, &value)| test.matches(value))
                })
            });
            let Some(tr) = next else {
                return Ok(CounterRun {
                    accepted: false,
                    trajectory,
                    dead_at: Some(i),
                });
            };
            for (value, inc) in config.counters.iter_mut().zip(&tr.increments) {
                *value += inc;
            }
            config.state = tr.to;
            trajectory.push(config.clone());
        }
        let accepted = self.accepts_config(&config);
        Ok(CounterRun {
            accepted,
            trajectory,
            dead_at: None,
        })
    }
}

/// Why a compilation refused its input machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CompileError {
    ExpectedBlind,
    ExpectedNonBlind,
    ExpectedOneCounter { counters: usize },
    ExpectedZeroAcceptance,
}

impl std::fmt::Display for CompileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompileError::ExpectedBlind => write!(f, "this compilation needs a blind machine"),
            CompileError::ExpectedNonBlind => {
                write!(f, "this compilation needs a zero-testing machine")
            }
            CompileError::ExpectedOneCounter { counters } => write!(
                f,
                "this compilation handles exactly 1 counter, got {counters}; \
                 zero tests on individual counters have no vector-machine analogue for k >= 2"
            ),
            CompileError::ExpectedZeroAcceptance => write!(
                f,
                "this compilation needs acceptance \"state_and_zero\"; \
                 the vector machine always checks its vector at the end"
            ),
        }
    }
}

impl std::error::Error for CompileError {}

/// Compiles a blind k-counter machine into a blind deterministic
/// (k+1)-dimensional vector machine accepting the same language.
///
/// Transition matrices are the identity with the last row's first k
/// entries set to the increments; starting from all ones, the vector after
/// any prefix is [1+c_1, ..., 1+c_k, 1], so it is home exactly when all
/// counters are 0.
pub fn compile_blind(machine: &CounterMachine) -> Result<HvaDef, CompileError> {
    if !machine.is_blind() {
        return Err(CompileError::ExpectedBlind);
    }
    let def = machine.def();
    let k = def.counters;
    let transitions = def
        .transitions
        .iter()
        .map(|tr| {
            let mut matrix = vec![vec![Rational::zero(); k + 1]; k + 1];
            for (i, row) in matrix.iter_mut().enumerate() {
                row[i] = Rational::one();
            }
            for (i, &c) in tr.increments.iter().enumerate() {
                matrix[k][i] = Rational::from(c);
            }
            TransitionDef {
                from: tr.from.clone(),
                symbol: tr.symbol.clone(),
                guard: Guard::Any,
                to: tr.to.clone(),
                matrix,
            }
        })
        .collect();
    Ok(HvaDef {
        name: format!("{}_hva", def.name),
        dimension: k + 1,
        alphabet: def.alphabet.clone(),
        states: def.states.clone(),
        initial_state: def.initial_state.clone(),
        accept_states: def.accept_states.clone(),
        deterministic: true,
        blind: true,
        initial_vector: vec![Rational::one(); k + 1],
        transitions,
    })
}

/// Compiles a zero-testing 1-counter machine (with `state_and_zero`
/// acceptance) into a non-blind deterministic 2-dimensional vector machine.
///
/// The vector tracks [1+c, 1]: increments become the add/subtract/identity
/// matrices and the `eq`/`neq` zero tests become the vector-at-home guards,
/// which agree because the counter is 0 exactly when the vector is [1, 1].
pub fn compile_one_counter(machine: &CounterMachine) -> Result<HvaDef, CompileError> {
    if machine.is_blind() {
        return Err(CompileError::ExpectedNonBlind);
    }
    if machine.counters() != 1 {
        return Err(CompileError::ExpectedOneCounter {
            counters: machine.counters(),
        });
    }
    if machine.acceptance() != Acceptance::StateAndZero {
        return Err(CompileError::ExpectedZeroAcceptance);
    }
    let def = machine.def();
    let row = |a: i64, b: i64| vec![Rational::from(a), Rational::from(b)];
    let transitions = def
        .transitions
        .iter()
        .map(|tr| {
            let pattern = tr.zero_pattern.as_ref().expect("validated non-blind");
            let guard = match pattern[0] {
                ZeroTest::Eq => Guard::Eq,
                ZeroTest::Neq => Guard::Neq,
            };
            let matrix = match tr.increments[0] {
                1 => vec![row(1, 0), row(1, 1)],
                -1 => vec![row(1, 0), row(-1, 1)],
                _ => vec![row(1, 0), row(0, 1)],
            };
            TransitionDef {
                from: tr.from.clone(),
                symbol: tr.symbol.clone(),
                guard,
                to: tr.to.clone(),
                matrix,
            }
        })
        .collect();
    Ok(HvaDef {
        name: format!("{}_hva", def.name),
        dimension: 2,
        alphabet: def.alphabet.clone(),
        states: def.states.clone(),
        initial_state: def.initial_state.clone(),
        accept_states: def.accept_states.clone(),
        deterministic: true,
        blind: false,
        initial_vector: vec![Rational::one(), Rational::one()],
        transitions,
    })
}
