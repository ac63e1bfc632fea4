//! Homing vector automata: the machine definition format, validation, and
//! real-time run semantics.
//!
//! A machine of dimension `k` carries a row vector that starts at the
//! machine's initial vector `v`. Reading one input symbol takes exactly one
//! transition: the guard is evaluated against the *current* vector (before
//! any matrix applies), and the chosen transition's matrix then multiplies
//! the vector on the right. An input is accepted when, after the last
//! symbol, some reachable configuration is in an accept state with its
//! vector exactly equal to `v`. The empty input is therefore accepted
//! exactly when the initial state accepts.
//!
//! Guards: `eq` fires when the vector currently equals `v`, `neq` when it
//! differs, `any` always. Blind machines use only `any`. A machine declared
//! deterministic may have at most one applicable transition per state,
//! symbol, and guard outcome; an `eq`/`neq` pair on the same state and
//! symbol is deterministic, while `any` alongside either is not.
//!
//! Missing transitions kill a branch: a configuration with no applicable
//! transition is dropped, and an input all of whose branches die is
//! rejected. Nondeterministic machines are simulated breadth-first over
//! deduplicated sets of `(state, vector)` configurations with a configurable
//! size budget.
//!
//! The JSON file format mirrors [`HvaDef`] field for field. Vector and
//! matrix entries are rational strings (`"3"`, `"-1/2"`), and alphabet
//! symbols in files are single-character strings.

use crate::linalg::{RMatrix, RVector};
use crate::rational::Rational;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::fmt;

/// Transition guard, evaluated against the vector before the step's matrix
/// is applied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Guard {
    /// Fires when the current vector equals the initial vector.
    Eq,
    /// Fires when the current vector differs from the initial vector.
    Neq,
    /// Always fires. The only guard a blind machine may use.
    Any,
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Guard::Eq => "eq",
            Guard::Neq => "neq",
            Guard::Any => "any",
        })
    }
}

/// One transition of a machine definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDef {
    pub from: String,
    pub symbol: String,
    pub guard: Guard,
    pub to: String,
    pub matrix: Vec<Vec<Rational>>,
}

/// A machine definition: the raw, serializable form, mirroring the JSON
/// file format one to one.
///
/// Definitions may be structurally invalid; [`HvaDef::validate`] reports
/// every violation, and [`Hva`] (the runnable form) can only be built from
/// a definition that validates cleanly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HvaDef {
    pub name: String,
    pub dimension: usize,
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub initial_state: String,
    pub accept_states: Vec<String>,
    pub deterministic: bool,
    pub blind: bool,
    pub initial_vector: Vec<Rational>,
    pub transitions: Vec<TransitionDef>,
}

/// A single validation violation, naming the offending field or transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    ZeroDimension,
    EmptyAlphabet,
    EmptyStates,
    EmptySymbol,
    DuplicateSymbol(String),
    DuplicateState(String),
    UnknownInitialState(String),
    UnknownAcceptState(String),
    InitialVectorDimension { expected: usize, found: usize },
    UnknownFromState { transition: usize, name: String },
    UnknownToState { transition: usize, name: String },
    UnknownSymbol { transition: usize, name: String },
    MatrixDimension { transition: usize, expected: usize },
    BlindGuard { transition: usize, guard: Guard },
    Nondeterministic { state: String, symbol: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroDimension => write!(f, "dimension must be at least 1"),
            Violation::EmptyAlphabet => write!(f, "alphabet is empty"),
            Violation::EmptyStates => write!(f, "state list is empty"),
            Violation::EmptySymbol => write!(f, "alphabet contains an empty symbol"),
            Violation::DuplicateSymbol(s) => write!(f, "duplicate alphabet symbol {s:?}"),
            Violation::DuplicateState(s) => write!(f, "duplicate state {s:?}"),
            Violation::UnknownInitialState(s) => {
                write!(f, "initial state {s:?} is not in the state list")
            }
            Violation::UnknownAcceptState(s) => {
                write!(f, "accept state {s:?} is not in the state list")
            }
            Violation::InitialVectorDimension { expected, found } => {
                write!(f, "initial vector has {found} entries, expected {expected}")
            }
            Violation::UnknownFromState { transition, name } => {
                write!(f, "transition #{transition}: unknown source state {name:?}")
            }
            Violation::UnknownToState { transition, name } => {
                write!(f, "transition #{transition}: unknown target state {name:?}")
            }
            Violation::UnknownSymbol { transition, name } => {
                write!(f, "transition #{transition}: unknown symbol {name:?}")
            }
            Violation::MatrixDimension { transition, expected } => {
                write!(f, "transition #{transition}: matrix is not {expected}x{expected}")
            }
            Violation::BlindGuard { transition, guard } => {
                write!(
                    f,
                    "transition #{transition}: blind machine uses guard \"{guard}\""
                )
            }
            Violation::Nondeterministic { state, symbol } => {
                write!(
                    f,
                    "state {state:?} on symbol {symbol:?} has more than one applicable \
                     transition for some guard outcome"
                )
            }
        }
    }
}

/// Error carrying every violation found when building a runnable machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvalidMachine(pub Vec<Violation>);

impl fmt::Display for InvalidMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid machine:")?;
        for v in &self.0 {
            write!(f, "\n  {v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for InvalidMachine {}

impl HvaDef {
    /// Checks every structural invariant and returns the full list of
    /// violations; an empty list means the definition is well formed.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        if self.dimension == 0 {
            out.push(Violation::ZeroDimension);
        }
        if self.alphabet.is_empty() {
            out.push(Violation::EmptyAlphabet);
        }
        if self.states.is_empty() {
            out.push(Violation::EmptyStates);
        }

        let mut symbols = HashSet::new();
        for s in &self.alphabet {
            if s.is_empty() {
                out.push(Violation::EmptySymbol);
            }
            if !symbols.insert(s.as_str()) {
                out.push(Violation::DuplicateSymbol(s.clone()));
            }
        }
        let mut states = HashSet::new();
        for s in &self.states {
            if !states.insert(s.as_str()) {
                out.push(Violation::DuplicateState(s.clone()));
            }
        }

        if !states.contains(self.initial_state.as_str()) {
            out.push(Violation::UnknownInitialState(self.initial_state.clone()));
        }
        for s in &self.accept_states {
            if !states.contains(s.as_str()) {
                out.push(Violation::UnknownAcceptState(s.clone()));
            }
        }
        if self.initial_vector.len() != self.dimension {
            out.push(Violation::InitialVectorDimension {
                expected: self.dimension,
                found: self.initial_vector.len(),
            });
        }

        // Count ANY/EQ/NEQ transitions per (state, symbol) for the
        // determinism check below.
        let mut guard_counts: HashMap<(&str, &str), [u32; 3]> = HashMap::new();
        for (i, t) in self.transitions.iter().enumerate() {
            let from_known = states.contains(t.from.as_str());
            if !from_known {
                out.push(Violation::UnknownFromState {
                    transition: i,
                    name: t.from.clone(),
                });
            }
            if !states.contains(t.to.as_str()) {
                out.push(Violation::UnknownToState {
                    transition: i,
                    name: t.to.clone(),
                });
            }
            let symbol_known = symbols.contains(t.symbol.as_str());
            if !symbol_known {
                out.push(Violation::UnknownSymbol {
                    transition: i,
                    name: t.symbol.clone(),
                });
            }
            if t.matrix.len() != self.dimension
                || t.matrix.iter().any(|row| row.len() != self.dimension)
            {
                out.push(Violation::MatrixDimension {
                    transition: i,
                    expected: self.dimension,
                });
            }
            if self.blind && t.guard != Guard::Any {
                out.push(Violation::BlindGuard {
                    transition: i,
                    guard: t.guard,
                });
            }
            if from_known && symbol_known {
                let counts = guard_counts
                    .entry((t.from.as_str(), t.symbol.as_str()))
                    .or_default();
                counts[match t.guard {
                    Guard::Eq => 0,
                    Guard::Neq => 1,
                    Guard::Any => 2,
                }] += 1;
            }
        }

        if self.deterministic {
            // For each concrete guard outcome at most one transition may
            // apply: an eq/neq pair is fine, `any` next to anything is not.
            let mut pairs: Vec<_> = guard_counts.into_iter().collect();
            pairs.sort();
            for ((state, symbol), [eq, neq, any]) in pairs {
                if any + eq > 1 || any + neq > 1 {
                    out.push(Violation::Nondeterministic {
                        state: state.to_owned(),
                        symbol: symbol.to_owned(),
                    });
                }
            }
        }
        out
    }

    /// Serializes to the JSON file format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("definitions always serialize")
    }

    /// Parses the JSON file format. The definition is returned even if it
    /// fails [`HvaDef::validate`]; use [`Hva::try_from`] to get a runnable
    /// machine, which rejects invalid definitions.
    pub fn from_json(json: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(json)
    }
}

/// One machine configuration: a state together with the current vector.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Configuration {
    pub state: usize,
    pub vector: RVector,
}

struct CompiledTransition {
    guard: Guard,
    to: usize,
    matrix: RMatrix,
}

/// A validated, runnable machine.
///
/// States and symbols are referred to by index into the definition's lists;
/// the original definition is kept for export and naming.
pub struct Hva {
    def: HvaDef,
    symbol_index: HashMap<String, usize>,
    initial_state: usize,
    accepting: Vec<bool>,
    initial_vector: RVector,
    /// `table[state][symbol]` lists the outgoing transitions.
    table: Vec<Vec<Vec<CompiledTransition>>>,
}

impl TryFrom<HvaDef> for Hva {
    type Error = InvalidMachine;

    fn try_from(def: HvaDef) -> Result<Self, Self::Error> {
        let violations = def.validate();
        if !violations.is_empty() {
            return Err(InvalidMachine(violations));
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
        let mut table: Vec<Vec<Vec<CompiledTransition>>> = (0..def.states.len())
            .map(|_| (0..def.alphabet.len()).map(|_| Vec::new()).collect())
            .collect();
        for t in &def.transitions {
            table[state_index[&t.from]][symbol_index[&t.symbol]].push(CompiledTransition {
                guard: t.guard,
                to: state_index[&t.to],
                matrix: RMatrix::from_rows(t.matrix.clone())
                    .expect("matrix dimensions were validated"),
            });
        }
        let initial_vector = RVector::new(def.initial_vector.clone())
            .expect("vector dimension was validated");
        Ok(Hva {
            initial_state: state_index[&def.initial_state],
            accepting,
            initial_vector,
            symbol_index,
            table,
            def,
        })
    }
}

/// Resource limits for a run.
#[derive(Clone, Copy, Debug)]
pub struct RunLimits {
    /// Maximum size of the deduplicated configuration set after any step.
    pub max_configs: usize,
    /// Maximum number of steps; `None` means the input length is the only
    /// bound (runs are real-time).
    pub max_steps: Option<u64>,
}

impl Default for RunLimits {
    fn default() -> Self {
        RunLimits {
            max_configs: 100_000,
            max_steps: None,
        }
    }
}

/// Statistics gathered during a run.
#[derive(Clone, Debug)]
pub struct RunStats {
    pub steps: u64,
    pub max_config_set: usize,
    pub max_abs_entry: Rational,
}

/// Outcome of a completed run.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub accepted: bool,
    /// The deduplicated configuration set after the last symbol, in
    /// canonical (state, vector) order. Empty when every branch died.
    pub final_configs: Vec<Configuration>,
    pub stats: RunStats,
}

/// Errors from running a machine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunError {
    UnknownSymbol { symbol: String },
    /// The configuration set outgrew the budget.
    ConfigBudget { step: u64, size: usize, max: usize },
    StepBudget { max: u64 },
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::UnknownSymbol { symbol } => {
                write!(f, "symbol {symbol:?} is not in the machine's alphabet")
            }
            RunError::ConfigBudget { step, size, max } => write!(
                f,
                "configuration set grew to {size} at step {step}, budget is {max}"
            ),
            RunError::StepBudget { max } => write!(f, "step budget of {max} exhausted"),
        }
    }
}

impl std::error::Error for RunError {}

impl Hva {
    pub fn name(&self) -> &str {
        &self.def.name
    }

    pub fn dimension(&self) -> usize {
        self.def.dimension
    }

    pub fn alphabet(&self) -> &[String] {
        &self.def.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.def.states
    }

    pub fn state_name(&self, id: usize) -> &str {
        &self.def.states[id]
    }

    pub fn initial_state(&self) -> usize {
        self.initial_state
    }

    pub fn is_accepting(&self, state: usize) -> bool {
        self.accepting[state]
    }

    pub fn is_deterministic(&self) -> bool {
        self.def.deterministic
    }

    pub fn is_blind(&self) -> bool {
        self.def.blind
    }

    pub fn initial_vector(&self) -> &RVector {
        &self.initial_vector
    }

    /// The raw definition, for export and inspection.
    pub fn def(&self) -> &HvaDef {
        &self.def
    }

    pub fn symbol_id(&self, symbol: &str) -> Option<usize> {
        self.symbol_index.get(symbol).copied()
    }

    pub fn initial_config(&self) -> Configuration {
        Configuration {
            state: self.initial_state,
            vector: self.initial_vector.clone(),
        }
    }

    /// Splits an input into symbol ids, one per character.
    pub fn tokenize(&self, input: &str) -> Result<Vec<usize>, RunError> {
        input
            .chars()
            .map(|c| {
                let mut buf = [0u8; 4];
                let s: &str = c.encode_utf8(&mut buf);
                self.symbol_id(s).ok_or_else(|| RunError::UnknownSymbol {
                    symbol: s.to_owned(),
                })
            })
            .collect()
    }

    /// Splits a comma-separated input into symbol ids. The empty string is
    /// the empty input.
    pub fn tokenize_csv(&self, input: &str) -> Result<Vec<usize>, RunError> {
        if input.is_empty() {
            return Ok(Vec::new());
        }
        input
            .split(',')
            .map(|s| {
                self.symbol_id(s).ok_or_else(|| RunError::UnknownSymbol {
                    symbol: s.to_owned(),
                })
            })
            .collect()
    }

    /// Pushes every successor of `config` on `symbol` into `out`.
    ///
    /// The guard is evaluated against the configuration's current vector
    /// (before any matrix applies); each applicable transition contributes
    /// one successor with the vector multiplied by its matrix.
    pub fn successors(&self, config: &Configuration, symbol: usize, out: &mut Vec<Configuration>) {
        let at_home = config.vector == self.initial_vector;
        for t in &self.table[config.state][symbol] {
            let applies = match t.guard {
                Guard::Any => true,
                Guard::Eq => at_home,
                Guard::Neq => !at_home,
            };
            if applies {
                out.push(Configuration {
                    state: t.to,
                    vector: config
                        .vector
                        .mul_matrix(&t.matrix)
                        .expect("matrix dimensions were validated"),
                });
            }
        }
    }

    /// The deduplicated successor set of one configuration on one symbol.
    pub fn step(&self, config: &Configuration, symbol: &str) -> Result<Vec<Configuration>, RunError> {
        let sym = self
            .symbol_id(symbol)
            .ok_or_else(|| RunError::UnknownSymbol {
                symbol: symbol.to_owned(),
            })?;
        let mut out = Vec::new();
        self.successors(config, sym, &mut out);
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Steps a whole configuration set, deduplicating the result into
    /// canonical order.
    pub fn step_set(&self, configs: &[Configuration], symbol: usize, out: &mut Vec<Configuration>) {
        out.clear();
        for c in configs {
            self.successors(c, symbol, out);
        }
        out.sort();
        out.dedup();
    }

    /// Whether a configuration set contains an accepting configuration: an
    /// accept state whose vector equals the initial vector.
    pub fn accepts_set(&self, configs: &[Configuration]) -> bool {
        configs
            .iter()
            .any(|c| self.accepting[c.state] && c.vector == self.initial_vector)
    }

    /// Runs the machine on pre-tokenized input.
    pub fn run_symbols(&self, input: &[usize], limits: &RunLimits) -> Result<RunResult, RunError> {
        let mut configs = vec![self.initial_config()];
        let mut next = Vec::new();
        let mut stats = RunStats {
            steps: 0,
            max_config_set: 1,
            max_abs_entry: self.initial_vector.max_abs(),
        };
        for (i, &sym) in input.iter().enumerate() {
            if let Some(max) = limits.max_steps {
                if stats.steps >= max {
                    return Err(RunError::StepBudget { max });
                }
            }
            self.step_set(&configs, sym, &mut next);
            std::mem::swap(&mut configs, &mut next);
            stats.steps += 1;
            if configs.len() > limits.max_configs {
                return Err(RunError::ConfigBudget {
                    step: i as u64 + 1,
                    size: configs.len(),
                    max: limits.max_configs,
                });
            }
            stats.max_config_set = stats.max_config_set.max(configs.len());
            for c in &configs {
                let m = c.vector.max_abs();
                if m > stats.max_abs_entry {
                    stats.max_abs_entry = m;
                }
            }
            if configs.is_empty() {
                // Every branch died; the rest of the input cannot revive any.
                stats.steps = input.len() as u64;
                break;
            }
        }
        Ok(RunResult {
            accepted: self.accepts_set(&configs),
            final_configs: configs,
            stats,
        })
    }

    /// Runs on a string, one character per symbol.
    pub fn run(&self, input: &str, limits: &RunLimits) -> Result<RunResult, RunError> {
        self.run_symbols(&self.tokenize(input)?, limits)
    }

    /// The configuration set after every prefix of the input, starting with
    /// the initial configuration. Sets are deduplicated and canonically
    /// ordered; a dead run yields empty sets from the point of death on.
    pub fn trace_symbols(
        &self,
        input: &[usize],
        limits: &RunLimits,
    ) -> Result<Vec<Vec<Configuration>>, RunError> {
        let mut steps = Vec::with_capacity(input.len() + 1);
        let mut configs = vec![self.initial_config()];
        for (i, &sym) in input.iter().enumerate() {
            let mut next = Vec::new();
            self.step_set(&configs, sym, &mut next);
            if next.len() > limits.max_configs {
                return Err(RunError::ConfigBudget {
                    step: i as u64 + 1,
                    size: next.len(),
                    max: limits.max_configs,
                });
            }
            steps.push(configs);
            configs = next;
        }
        steps.push(configs);
        Ok(steps)
    }

    /// Trace over a plain string input.
    pub fn trace(&self, input: &str, limits: &RunLimits) -> Result<Vec<Vec<Configuration>>, RunError> {
        self.trace_symbols(&self.tokenize(input)?, limits)
    }
}

impl fmt::Debug for Hva {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Hva({}, dim {}, {} states, {} transitions)",
            self.def.name,
            self.def.dimension,
            self.def.states.len(),
            self.def.transitions.len()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn int_matrix(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter()
            .map(|r| r.iter().map(|&e| Rational::from(e)).collect())
            .collect()
    }

    /// One-state blind machine over {a} multiplying by the given 1x1 value.
    fn scalar_def(value: Rational) -> HvaDef {
        HvaDef {
            name: "scalar".into(),
            dimension: 1,
            alphabet: vec!["a".into()],
            states: vec!["q".into()],
            initial_state: "q".into(),
            accept_states: vec!["q".into()],
            deterministic: true,
            blind: true,
            initial_vector: vec![Rational::one()],
            transitions: vec![TransitionDef {
                from: "q".into(),
                symbol: "a".into(),
                guard: Guard::Any,
                to: "q".into(),
                matrix: vec![vec![value]],
            }],
        }
    }

    /// Deterministic non-blind machine: counts a's up, b's down, accepts
    /// when the count returns to zero (vector back at [1, 1]).
    fn updown_def() -> HvaDef {
        HvaDef {
            name: "updown".into(),
            dimension: 2,
            alphabet: vec!["a".into(), "b".into()],
            states: vec!["q".into()],
            initial_state: "q".into(),
            accept_states: vec!["q".into()],
            deterministic: true,
            blind: true,
            initial_vector: vec![Rational::one(), Rational::one()],
            transitions: vec![
                TransitionDef {
                    from: "q".into(),
                    symbol: "a".into(),
                    guard: Guard::Any,
                    to: "q".into(),
                    matrix: int_matrix(&[&[1, 0], &[1, 1]]),
                },
                TransitionDef {
                    from: "q".into(),
                    symbol: "b".into(),
                    guard: Guard::Any,
                    to: "q".into(),
                    matrix: int_matrix(&[&[1, 0], &[-1, 1]]),
                },
            ],
        }
    }

    #[test]
    fn empty_input_acceptance_tracks_initial_state() {
        let m: Hva = updown_def().try_into().unwrap();
        assert!(m.run("", &RunLimits::default()).unwrap().accepted);

        let mut def = updown_def();
        def.accept_states.clear();
        let m: Hva = def.try_into().unwrap();
        assert!(!m.run("", &RunLimits::default()).unwrap().accepted);
    }

    #[test]
    fn acceptance_needs_vector_back_home() {
        let m: Hva = updown_def().try_into().unwrap();
        let limits = RunLimits::default();
        assert!(m.run("ab", &limits).unwrap().accepted);
        assert!(m.run("aabb", &limits).unwrap().accepted);
        assert!(m.run("abab", &limits).unwrap().accepted);
        assert!(!m.run("aab", &limits).unwrap().accepted);
        assert!(!m.run("b", &limits).unwrap().accepted);
    }

    #[test]
    fn guards_see_the_vector_before_the_matrix() {
        // On 'a' with the vector at home, move to a sink that accepts only
        // if the guard really fired before the doubling matrix applied.
        let def = HvaDef {
            name: "guard_order".into(),
            dimension: 1,
            alphabet: vec!["a".into()],
            states: vec!["q".into(), "sink".into()],
            initial_state: "q".into(),
            accept_states: vec!["sink".into()],
            deterministic: true,
            blind: false,
            initial_vector: vec![Rational::one()],
            transitions: vec![
                TransitionDef {
                    from: "q".into(),
                    symbol: "a".into(),
                    guard: Guard::Eq,
                    to: "sink".into(),
                    matrix: vec![vec![Rational::one()]],
                },
                TransitionDef {
                    from: "q".into(),
                    symbol: "a".into(),
                    guard: Guard::Neq,
                    to: "q".into(),
                    matrix: vec![vec![Rational::from(2)]],
                },
            ],
        };
        let m: Hva = def.try_into().unwrap();
        // First 'a': vector is at home, so the eq branch fires.
        let result = m.run("a", &RunLimits::default()).unwrap();
        assert!(result.accepted);
        assert_eq!(result.final_configs.len(), 1);
        assert_eq!(result.final_configs[0].state, 1);
    }

    #[test]
    fn missing_transitions_kill_branches() {
        let mut def = updown_def();
        def.transitions.retain(|t| t.symbol != "b");
        let m: Hva = def.try_into().unwrap();
        let r = m.run("ab", &RunLimits::default()).unwrap();
        assert!(!r.accepted);
        assert!(r.final_configs.is_empty());
    }

    #[test]
    fn nondeterministic_branches_are_deduplicated() {
        // Two any-transitions with identical effect collapse to one config.
        let mut def = updown_def();
        def.deterministic = false;
        let dup = def.transitions[0].clone();
        def.transitions.push(dup);
        let m: Hva = def.try_into().unwrap();
        let r = m.run("a", &RunLimits::default()).unwrap();
        assert_eq!(r.final_configs.len(), 1);
        assert_eq!(r.stats.max_config_set, 1);
    }

    #[test]
    fn config_budget_is_enforced() {
        // Two distinct multipliers per symbol: after n steps the set holds
        // the n+1 distinct products 2^i * 3^(n-i).
        let def = HvaDef {
            name: "fork".into(),
            dimension: 1,
            alphabet: vec!["a".into()],
            states: vec!["q".into()],
            initial_state: "q".into(),
            accept_states: vec![],
            deterministic: false,
            blind: true,
            initial_vector: vec![Rational::one()],
            transitions: vec![
                TransitionDef {
                    from: "q".into(),
                    symbol: "a".into(),
                    guard: Guard::Any,
                    to: "q".into(),
                    matrix: vec![vec![Rational::from(2)]],
                },
                TransitionDef {
                    from: "q".into(),
                    symbol: "a".into(),
                    guard: Guard::Any,
                    to: "q".into(),
                    matrix: vec![vec![Rational::from(3)]],
                },
            ],
        };
        let m: Hva = def.try_into().unwrap();
        let limits = RunLimits {
            max_configs: 10,
            max_steps: None,
        };
        let err = m.run(&"a".repeat(20), &limits).unwrap_err();
        assert_eq!(
            err,
            RunError::ConfigBudget {
                step: 10,
                size: 11,
                max: 10
            }
        );
    }

    #[test]
    fn trace_records_every_prefix() {
        let m: Hva = updown_def().try_into().unwrap();
        let trace = m.trace("ab", &RunLimits::default()).unwrap();
        assert_eq!(trace.len(), 3);
        assert_eq!(trace[0][0].vector, RVector::from_i64(&[1, 1]));
        assert_eq!(trace[1][0].vector, RVector::from_i64(&[2, 1]));
        assert_eq!(trace[2][0].vector, RVector::from_i64(&[1, 1]));
    }

    #[test]
    fn scalar_machine_accepts_balanced_doubling() {
        let mut def = scalar_def(Rational::from(2));
        def.alphabet.push("b".into());
        def.transitions.push(TransitionDef {
            from: "q".into(),
            symbol: "b".into(),
            guard: Guard::Any,
            to: "q".into(),
            matrix: vec![vec![rat(1, 2).unwrap()]],
        });
        let m: Hva = def.try_into().unwrap();
        let limits = RunLimits::default();
        assert!(m.run("aabb", &limits).unwrap().accepted);
        assert!(!m.run("aab", &limits).unwrap().accepted);
    }

    #[test]
    fn validate_reports_blind_guard_violations() {
        let mut def = updown_def();
        def.transitions[1].guard = Guard::Eq;
        let violations = def.validate();
        assert_eq!(
            violations,
            vec![Violation::BlindGuard {
                transition: 1,
                guard: Guard::Eq
            }]
        );
        assert!(Hva::try_from(def).is_err());
    }

    #[test]
    fn validate_determinism_rule() {
        // eq + neq on the same key is deterministic.
        let mut def = updown_def();
        def.blind = false;
        def.transitions[0].guard = Guard::Eq;
        def.transitions.push(TransitionDef {
            guard: Guard::Neq,
            ..def.transitions[0].clone()
        });
        assert_eq!(def.validate(), vec![]);

        // any + eq on the same key is not.
        let mut def2 = updown_def();
        def2.blind = false;
        def2.transitions.push(TransitionDef {
            guard: Guard::Eq,
            ..def2.transitions[0].clone()
        });
        assert_eq!(
            def2.validate(),
            vec![Violation::Nondeterministic {
                state: "q".into(),
                symbol: "a".into()
            }]
        );

        // Two any-transitions on the same key: one violation, not two.
        let mut def3 = updown_def();
        def3.transitions.push(def3.transitions[0].clone());
        assert_eq!(
            def3.validate(),
            vec![Violation::Nondeterministic {
                state: "q".into(),
                symbol: "a".into()
            }]
        );
    }

    #[test]
    fn validate_reports_unknown_names_and_dimensions() {
        let mut def = updown_def();
        def.initial_state = "nope".into();
        def.accept_states = vec!["also_nope".into()];
        def.transitions[0].to = "ghost".into();
        def.transitions[1].matrix = int_matrix(&[&[1]]);
        def.initial_vector.pop();
        let violations = def.validate();
        assert!(violations.contains(&Violation::UnknownInitialState("nope".into())));
        assert!(violations.contains(&Violation::UnknownAcceptState("also_nope".into())));
        assert!(violations.contains(&Violation::UnknownToState {
            transition: 0,
            name: "ghost".into()
        }));
        assert!(violations.contains(&Violation::MatrixDimension {
            transition: 1,
            expected: 2
        }));
        assert!(violations.contains(&Violation::InitialVectorDimension {
            expected: 2,
            found: 1
        }));
    }

    #[test]
    fn json_round_trip_is_exact() {
        let def = updown_def();
        let json = def.to_json();
        let back = HvaDef::from_json(&json).unwrap();
        assert_eq!(back, def);
        // Rationals serialize as strings, never floats.
        assert!(json.contains("\"-1\""));
    }

    #[test]
    fn json_rejects_unknown_fields() {
        let mut json = updown_def().to_json();
        json = json.replacen("\"name\"", "\"surprise\": 1, \"name\"", 1);
        assert!(HvaDef::from_json(&json).is_err());
    }

    #[test]
    fn tokenize_rejects_foreign_symbols() {
        let m: Hva = updown_def().try_into().unwrap();
        assert!(matches!(
            m.run("ax", &RunLimits::default()),
            Err(RunError::UnknownSymbol { .. })
        ));
        assert_eq!(m.tokenize_csv("").unwrap(), Vec::<usize>::new());
        assert_eq!(m.tokenize_csv("a,b,a").unwrap(), vec![0, 1, 0]);
        assert!(m.tokenize_csv("a,,b").is_err());
    }
}
