//! Desk-scale verification machinery: exhaustive enumeration and
//! cross-checking, machine-vs-machine equivalence, entry-growth auditing,
//! and DFA extraction for machines over a one-symbol alphabet.
//!
//! # Enumeration order
//!
//! Every exhaustive operation visits all strings over the machine's
//! alphabet up to a length cap, and "first disagreement" always means the
//! least string in length-then-lexicographic order, where symbols compare
//! by their position in the machine's declared alphabet. Strings are the
//! concatenation of symbol names (alphabet symbols are usually single
//! characters).
//!
//! # How the walkers run
//!
//! Strings share prefixes, so the walkers explore the input trie
//! depth-first, carrying the deduplicated configuration set of the current
//! prefix and extending it one symbol at a time; each prefix's set is
//! computed once no matter how many longer strings extend it.
//! Configuration sets obey the same budget as plain runs; an over-budget
//! prefix is an error naming the least such prefix, found by finishing the
//! walk around the offending subtrees.
//!
//! Arithmetic is exact throughout. Machines whose matrices and initial
//! vector are all integers are simulated in machine integers with checked
//! operations, restarting the whole operation on big-rational arithmetic
//! if any product would overflow; machines with fractional entries use big
//! rationals from the start. Both paths produce identical results — the
//! integer path exists because exhaustive walks visit millions of
//! prefixes.
//!
//! `jobs > 1` splits enumeration and cross-checking across scoped worker
//! threads at a fixed shallow depth; partial results are merged and
//! re-sorted, so the outcome never depends on scheduling. Equivalence
//! checking and growth audits always run single-threaded: one compares two
//! machines in lockstep, the other folds small per-depth summaries, and
//! neither is the bottleneck in practice.

// Errors carry exact rationals and offending inputs by value so reports
// need no machine context to interpret; these Results are built a handful
// of times per operation, never in the per-prefix hot path.
#![allow(clippy::result_large_err)]

use crate::machine::{Guard, Hva, RunLimits};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use std::collections::HashMap;

/// Tuning knobs shared by the exhaustive operations.
#[derive(Clone, Debug)]
pub struct AnalysisOptions {
    /// Per-prefix configuration-set budget (the step budget is unused
    /// here; walk depth is capped by each operation's `maxlen`).
    pub limits: RunLimits,
    /// Worker threads for enumeration and cross-checking; 0 and 1 both
    /// mean single-threaded.
    pub jobs: usize,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            limits: RunLimits::default(),
            jobs: 1,
        }
    }
}

/// Errors from the analysis operations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnalysisError {
    /// A prefix's configuration set outgrew the budget.
    Budget {
        input: String,
        size: usize,
        max: usize,
    },
    /// Equivalence checking needs both machines to share an alphabet.
    AlphabetMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
    /// An observed entry exceeded the growth bound it is guaranteed to
    /// respect; this would falsify the implementation, not the theory.
    BoundViolation {
        machine: String,
        length: usize,
        observed: Rational,
        bound: Rational,
    },
    /// DFA extraction needs a one-symbol alphabet.
    NotUnary { alphabet: Vec<String> },
    /// DFA extraction needs a deterministic machine.
    NotDeterministic { machine: String },
    /// An extracted DFA failed its post-verification against direct
    /// simulation; this would falsify the implementation.
    DfaMismatch { length: usize },
}

impl std::fmt::Display for AnalysisError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AnalysisError::Budget { input, size, max } => write!(
                f,
                "configuration set for input {input:?} has {size} members, over the budget of {max}"
            ),
            AnalysisError::AlphabetMismatch { left, right } => {
                write!(f, "alphabets differ: {left:?} vs {right:?}")
            }
            AnalysisError::BoundViolation {
                machine,
                length,
                observed,
                bound,
            } => write!(
                f,
                "machine {machine:?} reached entry magnitude {observed} at length {length}, \
                 over the guaranteed bound {bound}"
            ),
            AnalysisError::NotUnary { alphabet } => {
                write!(f, "expected a one-symbol alphabet, got {alphabet:?}")
            }
            AnalysisError::NotDeterministic { machine } => {
                write!(f, "machine {machine:?} is not deterministic")
            }
            AnalysisError::DfaMismatch { length } => write!(
                f,
                "extracted DFA disagrees with direct simulation at length {length}"
            ),
        }
    }
}

impl std::error::Error for AnalysisError {}

// ---------------------------------------------------------------------------
// Exact-arithmetic engine with an integer fast path
// ---------------------------------------------------------------------------

/// Number system a walk runs in. The integer backend refuses machines with
/// fractional or oversized entries at compile time and signals overflow at
/// run time; the rational backend accepts everything and never overflows.
trait Backend {
    type Value: Clone + Ord + Eq + Send + Sync;
    /// Magnitude type for growth tracking.
    type Abs: Clone + Ord + Send;

    fn from_rational(r: &Rational) -> Option<Self::Value>;
    fn zero() -> Self::Value;
    fn is_zero(v: &Self::Value) -> bool;
    /// `acc + a·b`, or `None` on overflow.
    fn mul_add(acc: &Self::Value, a: &Self::Value, b: &Self::Value) -> Option<Self::Value>;
    fn abs(v: &Self::Value) -> Self::Abs;
    fn abs_zero() -> Self::Abs;
    fn abs_to_rational(a: &Self::Abs) -> Rational;
}

struct IntBackend;

impl Backend for IntBackend {
    type Value = i128;
    type Abs = u128;

    fn from_rational(r: &Rational) -> Option<i128> {
        if r.is_integer() {
            r.numer().to_i128()
        } else {
            None
        }
    }

    fn zero() -> i128 {
        0
    }

    fn is_zero(v: &i128) -> bool {
        *v == 0
    }

    fn mul_add(acc: &i128, a: &i128, b: &i128) -> Option<i128> {
        a.checked_mul(*b)?.checked_add(*acc)
    }

    fn abs(v: &i128) -> u128 {
        v.unsigned_abs()
    }

    fn abs_zero() -> u128 {
        0
    }

    fn abs_to_rational(a: &u128) -> Rational {
        Rational::from(BigInt::from(*a))
    }
}

struct ExactBackend;

impl Backend for ExactBackend {
    type Value = Rational;
    type Abs = Rational;

    fn from_rational(r: &Rational) -> Option<Rational> {
        Some(r.clone())
    }

    fn zero() -> Rational {
        Rational::zero()
    }

    fn is_zero(v: &Rational) -> bool {
        v.is_zero()
    }

    fn mul_add(acc: &Rational, a: &Rational, b: &Rational) -> Option<Rational> {
        Some(acc + &(a * b))
    }

    fn abs(v: &Rational) -> Rational {
        v.abs()
    }

    fn abs_zero() -> Rational {
        Rational::zero()
    }

    fn abs_to_rational(a: &Rational) -> Rational {
        a.clone()
    }
}

/// One configuration: state index plus vector.
type Config<B> = (usize, Vec<<B as Backend>::Value>);

struct EngineTransition<B: Backend> {
    guard: Guard,
    to: usize,
    /// `columns[j]` holds the nonzero (row, entry) pairs of matrix column
    /// j, so a vector-matrix product touches only nonzero entries.
    columns: Vec<Vec<(usize, B::Value)>>,
}

struct Compiled<B: Backend> {
    /// Symbol names in walk order (the machine's own alphabet order, or a
    /// shared order when two machines walk in lockstep).
    symbols: Vec<String>,
    initial_state: usize,
    accepting: Vec<bool>,
    initial: Vec<B::Value>,
    table: Vec<Vec<Vec<EngineTransition<B>>>>,
}

/// Lowers a validated machine into the walk representation with the given
/// symbol order, or `None` when the backend cannot represent its entries
/// (or a machine symbol is missing from `symbol_order`).
fn compile<B: Backend>(machine: &Hva, symbol_order: &[String]) -> Option<Compiled<B>> {
    let def = machine.def();
    let k = def.dimension;
    let state_index: HashMap<&str, usize> = def
        .states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let symbol_index: HashMap<&str, usize> = symbol_order
        .iter()
        .enumerate()
        .map(|(i, s)| (s.as_str(), i))
        .collect();
    let initial = def
        .initial_vector
        .iter()
        .map(B::from_rational)
        .collect::<Option<Vec<_>>>()?;
    let mut accepting = vec![false; def.states.len()];
    for s in &def.accept_states {
        accepting[state_index[s.as_str()]] = true;
    }
    let mut table: Vec<Vec<Vec<EngineTransition<B>>>> = (0..def.states.len())
        .map(|_| (0..symbol_order.len()).map(|_| Vec::new()).collect())
        .collect();
    for tr in &def.transitions {
        let mut columns = vec![Vec::new(); k];
        for (i, row) in tr.matrix.iter().enumerate() {
            for (j, entry) in row.iter().enumerate() {
                if !entry.is_zero() {
                    columns[j].push((i, B::from_rational(entry)?));
                }
            }
        }
        let symbol = *symbol_index.get(tr.symbol.as_str())?;
        table[state_index[tr.from.as_str()]][symbol].push(EngineTransition {
            guard: tr.guard,
            to: state_index[tr.to.as_str()],
            columns,
        });
    }
    Some(Compiled {
        symbols: symbol_order.to_vec(),
        initial_state: state_index[def.initial_state.as_str()],
        accepting,
        initial,
        table,
    })
}

/// `v · M` over the sparse columns; `None` on overflow.
fn apply<B: Backend>(v: &[B::Value], columns: &[Vec<(usize, B::Value)>]) -> Option<Vec<B::Value>> {
    columns
        .iter()
        .map(|col| {
            let mut acc = B::zero();
            for (i, entry) in col {
                if !B::is_zero(&v[*i]) {
                    acc = B::mul_add(&acc, &v[*i], entry)?;
                }
            }
            Some(acc)
        })
        .collect()
}

/// Extends every configuration by one symbol into `out` (sorted, deduped);
/// `None` on overflow. Guards read the pre-transition vector.
fn step_set<B: Backend>(
    cm: &Compiled<B>,
    configs: &[Config<B>],
    symbol: usize,
    out: &mut Vec<Config<B>>,
) -> Option<()> {
    out.clear();
    for (state, vector) in configs {
        for tr in &cm.table[*state][symbol] {
            let pass = match tr.guard {
                Guard::Any => true,
                Guard::Eq => vector[..] == cm.initial[..],
                Guard::Neq => vector[..] != cm.initial[..],
            };
            if pass {
                out.push((tr.to, apply::<B>(vector, &tr.columns)?));
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    Some(())
}

fn accepts<B: Backend>(cm: &Compiled<B>, configs: &[Config<B>]) -> bool {
    configs
        .iter()
        .any(|(state, vector)| cm.accepting[*state] && vector[..] == cm.initial[..])
}

/// Integer-backend overflow: restart the operation on the rational backend.
struct Overflow;

/// What a visitor tells the walker to do below the current node.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Action {
    Continue,
    /// Skip the subtree: nothing below can change the visitor's answer.
    Skip,
}

trait Visit<B: Backend> {
    fn node(&mut self, path: &[usize], text: &str, configs: &[Config<B>], accepted: bool)
        -> Action;
}

/// The least over-budget prefix seen: (symbol path, text, set size).
type BudgetHit = (Vec<usize>, String, usize);

fn lesser_hit(a: Option<BudgetHit>, b: Option<BudgetHit>) -> Option<BudgetHit> {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(a), Some(b)) => Some(if (a.0.len(), &a.0) <= (b.0.len(), &b.0) { a } else { b }),
    }
}

/// Depth-first walker over the input trie, sharing each prefix's
/// configuration set across all of its extensions.
struct Walker<'a, B: Backend> {
    cm: &'a Compiled<B>,
    maxlen: usize,
    max_configs: usize,
    /// `levels[d]` is the configuration set of the current depth-d prefix.
    levels: Vec<Vec<Config<B>>>,
    path: Vec<usize>,
    text: String,
    text_lens: Vec<usize>,
    budget_hit: Option<BudgetHit>,
}

impl<'a, B: Backend> Walker<'a, B> {
    fn new(cm: &'a Compiled<B>, maxlen: usize, max_configs: usize) -> Self {
        let mut levels: Vec<Vec<Config<B>>> = Vec::with_capacity(maxlen + 1);
        levels.push(vec![(cm.initial_state, cm.initial.clone())]);
        levels.resize_with(maxlen + 1, Vec::new);
        Walker {
            cm,
            maxlen,
            max_configs,
            levels,
            path: Vec::new(),
            text: String::new(),
            text_lens: Vec::new(),
            budget_hit: None,
        }
    }

    /// Seats the walker on a mid-trie node instead of the root.
    fn seat(&mut self, path: &[usize], text: &str, configs: Vec<Config<B>>) {
        let depth = path.len();
        self.levels[depth] = configs;
        self.path = path.to_vec();
        self.text = text.to_owned();
        self.text_lens.clear();
    }

    fn dfs(&mut self, depth: usize, visitor: &mut impl Visit<B>) -> Result<(), Overflow> {
        let accepted = accepts(self.cm, &self.levels[depth]);
        let action = visitor.node(&self.path, &self.text, &self.levels[depth], accepted);
        if action == Action::Skip || depth == self.maxlen {
            return Ok(());
        }
        self.children(depth, visitor)
    }

    /// Visits every strict descendant of the current depth-`depth` node.
    fn children(&mut self, depth: usize, visitor: &mut impl Visit<B>) -> Result<(), Overflow> {
        for symbol in 0..self.cm.symbols.len() {
            let (head, tail) = self.levels.split_at_mut(depth + 1);
            step_set(self.cm, &head[depth], symbol, &mut tail[0]).ok_or(Overflow)?;
            let size = tail[0].len();
            self.path.push(symbol);
            self.text_lens.push(self.text.len());
            self.text.push_str(&self.cm.symbols[symbol]);
            if size > self.max_configs {
                let hit = Some((self.path.clone(), self.text.clone(), size));
                self.budget_hit = lesser_hit(self.budget_hit.take(), hit);
            } else {
                self.dfs(depth + 1, visitor)?;
            }
            self.path.pop();
            let len = self.text_lens.pop().expect("pushed above");
            self.text.truncate(len);
        }
        Ok(())
    }
}

/// Sum of `alphabet^i` for i in 1..=depth, saturating.
fn strings_below(alphabet: usize, depth: usize) -> u64 {
    let mut total = 0u64;
    let mut level = 1u64;
    for _ in 0..depth {
        level = level.saturating_mul(alphabet as u64);
        total = total.saturating_add(level);
    }
    total
}

// ---------------------------------------------------------------------------
// Parallel scaffolding: split the trie at a fixed shallow depth
// ---------------------------------------------------------------------------

const SPLIT_DEPTH: usize = 2;

/// A depth-`SPLIT_DEPTH` node handed to a worker.
struct Root<B: Backend> {
    path: Vec<usize>,
    text: String,
    configs: Vec<Config<B>>,
}

/// Wraps a visitor and additionally collects the nodes at the split depth
/// so workers can resume below them.
struct RootCollector<'a, B: Backend, V: Visit<B>> {
    inner: &'a mut V,
    depth: usize,
    roots: Vec<Root<B>>,
}

impl<B: Backend, V: Visit<B>> Visit<B> for RootCollector<'_, B, V> {
    fn node(&mut self, path: &[usize], text: &str, configs: &[Config<B>], accepted: bool)
        -> Action {
        let action = self.inner.node(path, text, configs, accepted);
        if path.len() == self.depth && action == Action::Continue {
            self.roots.push(Root {
                path: path.to_vec(),
                text: text.to_owned(),
                configs: configs.to_vec(),
            });
        }
        action
    }
}

/// Walks the whole trie with one visitor per worker (plus the serial-phase
/// visitor), splitting below `SPLIT_DEPTH` when `jobs > 1`. The caller
/// merges the visitors; the budget verdict is already merged.
fn walk_all<B, V, M>(
    cm: &Compiled<B>,
    maxlen: usize,
    opts: &AnalysisOptions,
    make_visitor: M,
) -> Result<(V, Vec<V>, Option<BudgetHit>), Overflow>
where
    B: Backend,
    V: Visit<B> + Send,
    M: Fn() -> V + Sync,
{
    let jobs = opts.jobs.max(1);
    let max_configs = opts.limits.max_configs;
    let mut serial_visitor = make_visitor();
    if jobs == 1 || maxlen <= SPLIT_DEPTH || cm.symbols.len() < 2 {
        let mut walker = Walker::new(cm, maxlen, max_configs);
        walker.dfs(0, &mut serial_visitor)?;
        return Ok((serial_visitor, Vec::new(), walker.budget_hit));
    }

    // Serial phase: everything at depth <= SPLIT_DEPTH, collecting roots.
    let mut shallow = Walker::new(cm, SPLIT_DEPTH, max_configs);
    let mut collector = RootCollector {
        inner: &mut serial_visitor,
        depth: SPLIT_DEPTH,
        roots: Vec::new(),
    };
    shallow.dfs(0, &mut collector)?;
    let roots = collector.roots;
    let mut budget = shallow.budget_hit;

    // Parallel phase: strict descendants of each root, round-robin.
    let worker_count = jobs.min(roots.len()).max(1);
    let mut buckets: Vec<Vec<Root<B>>> = (0..worker_count).map(|_| Vec::new()).collect();
    for (i, root) in roots.into_iter().enumerate() {
        buckets[i % worker_count].push(root);
    }
    let results: Vec<Result<(V, Option<BudgetHit>), Overflow>> = std::thread::scope(|scope| {
        let make_visitor = &make_visitor;
        let handles: Vec<_> = buckets
            .into_iter()
            .map(|bucket| {
                scope.spawn(move || {
                    let mut visitor = make_visitor();
                    let mut walker = Walker::new(cm, maxlen, max_configs);
                    for root in bucket {
                        walker.seat(&root.path, &root.text, root.configs);
                        walker.children(root.path.len(), &mut visitor)?;
                    }
                    Ok((visitor, walker.budget_hit))
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("walk workers do not panic"))
            .collect()
    });
    let mut workers = Vec::new();
    for result in results {
        let (visitor, hit) = result?;
        workers.push(visitor);
        budget = lesser_hit(budget, hit);
    }
    Ok((serial_visitor, workers, budget))
}

/// Runs an operation on the integer backend when the machine allows it,
/// restarting on the rational backend after an overflow.
fn with_backends<R>(
    machine: &Hva,
    int_run: impl FnOnce(&Compiled<IntBackend>) -> Result<R, Overflow>,
    exact_run: impl FnOnce(&Compiled<ExactBackend>) -> Result<R, Overflow>,
) -> R {
    let order = machine.def().alphabet.clone();
    if let Some(cm) = compile::<IntBackend>(machine, &order) {
        if let Ok(result) = int_run(&cm) {
            return result;
        }
    }
    let cm = compile::<ExactBackend>(machine, &order)
        .expect("the rational backend accepts every machine");
    match exact_run(&cm) {
        Ok(result) => result,
        Err(Overflow) => unreachable!("rational arithmetic does not overflow"),
    }
}

fn budget_error(hit: BudgetHit, max: usize) -> AnalysisError {
    let (_, input, size) = hit;
    AnalysisError::Budget { input, size, max }
}

// ---------------------------------------------------------------------------
// enumerate_language
// ---------------------------------------------------------------------------

struct EnumerateVisit {
    accepted: Vec<(Vec<usize>, String)>,
}

impl<B: Backend> Visit<B> for EnumerateVisit {
    fn node(&mut self, path: &[usize], text: &str, configs: &[Config<B>], accepted: bool)
        -> Action {
        if accepted {
            self.accepted.push((path.to_vec(), text.to_owned()));
        }
        if configs.is_empty() {
            Action::Skip
        } else {
            Action::Continue
        }
    }
}

fn enumerate_with<B: Backend>(
    cm: &Compiled<B>,
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<Result<Vec<String>, AnalysisError>, Overflow> {
    let (serial, workers, budget) =
        walk_all(cm, maxlen, opts, || EnumerateVisit { accepted: Vec::new() })?;
    if let Some(hit) = budget {
        return Ok(Err(budget_error(hit, opts.limits.max_configs)));
    }
    let mut all = serial.accepted;
    for w in workers {
        all.extend(w.accepted);
    }
    all.sort_by(|a, b| (a.0.len(), &a.0).cmp(&(b.0.len(), &b.0)));
    Ok(Ok(all.into_iter().map(|(_, text)| text).collect()))
}

/// All accepted strings of length at most `maxlen`, in
/// length-then-lexicographic order (symbols ordered as in the alphabet).
pub fn enumerate_language(
    machine: &Hva,
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<Vec<String>, AnalysisError> {
    with_backends(
        machine,
        |cm| enumerate_with(cm, maxlen, opts),
        |cm| enumerate_with(cm, maxlen, opts),
    )
}

// ---------------------------------------------------------------------------
// cross_check
// ---------------------------------------------------------------------------

/// Outcome of comparing a machine against a reference predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckResult {
    Pass {
        strings_checked: u64,
    },
    /// The least string (in length-then-lexicographic order) on which the
    /// machine and the reference differ.
    Disagreement {
        input: String,
        machine_accepts: bool,
        reference_accepts: bool,
    },
}

struct CrossCheckVisit<'p> {
    reference: &'p (dyn Fn(&str) -> bool + Sync),
    checked: u64,
    best: Option<(Vec<usize>, String, bool, bool)>,
}

impl<B: Backend> Visit<B> for CrossCheckVisit<'_> {
    fn node(&mut self, path: &[usize], text: &str, _configs: &[Config<B>], accepted: bool)
        -> Action {
        // Once a disagreement no longer than the current depth is known,
        // nothing at or below this node can beat it: everything here is
        // longer, or the same length but later in lexicographic order.
        if let Some((best_path, _, _, _)) = &self.best {
            if best_path.len() <= path.len() {
                return Action::Skip;
            }
        }
        self.checked += 1;
        let expected = (self.reference)(text);
        if expected != accepted {
            self.best = Some((path.to_vec(), text.to_owned(), accepted, expected));
        }
        Action::Continue
    }
}

fn cross_check_with<B: Backend>(
    cm: &Compiled<B>,
    reference: &(dyn Fn(&str) -> bool + Sync),
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<Result<CheckResult, AnalysisError>, Overflow> {
    let (serial, workers, budget) = walk_all(cm, maxlen, opts, || CrossCheckVisit {
        reference,
        checked: 0,
        best: None,
    })?;
    if let Some(hit) = budget {
        return Ok(Err(budget_error(hit, opts.limits.max_configs)));
    }
    let mut checked = serial.checked;
    let mut best = serial.best;
    for w in workers {
        checked += w.checked;
        best = match (best, w.best) {
            (None, b) => b,
            (a, None) => a,
            (Some(a), Some(b)) => {
                Some(if (a.0.len(), &a.0) <= (b.0.len(), &b.0) { a } else { b })
            }
        };
    }
    Ok(Ok(match best {
        None => CheckResult::Pass {
            strings_checked: checked,
        },
        Some((_, input, machine_accepts, reference_accepts)) => CheckResult::Disagreement {
            input,
            machine_accepts,
            reference_accepts,
        },
    }))
}

/// Compares machine acceptance against a reference predicate on every
/// string up to `maxlen`, reporting the least disagreement if any.
pub fn cross_check(
    machine: &Hva,
    reference: &(dyn Fn(&str) -> bool + Sync),
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<CheckResult, AnalysisError> {
    with_backends(
        machine,
        |cm| cross_check_with(cm, reference, maxlen, opts),
        |cm| cross_check_with(cm, reference, maxlen, opts),
    )
}

// ---------------------------------------------------------------------------
// equivalence
// ---------------------------------------------------------------------------

/// Outcome of comparing two machines on every string up to a length cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceResult {
    Pass {
        strings_checked: u64,
    },
    /// The least string accepted by exactly one machine.
    Disagreement {
        input: String,
        left_accepts: bool,
        right_accepts: bool,
    },
}

/// Lockstep walker: one trie walk stepping two machines side by side.
struct PairWalker<'a, B: Backend> {
    left: &'a Compiled<B>,
    right: &'a Compiled<B>,
    maxlen: usize,
    max_configs: usize,
    levels_left: Vec<Vec<Config<B>>>,
    levels_right: Vec<Vec<Config<B>>>,
    path: Vec<usize>,
    text: String,
    text_lens: Vec<usize>,
    budget_hit: Option<BudgetHit>,
    checked: u64,
    best: Option<(Vec<usize>, String, bool, bool)>,
}

impl<'a, B: Backend> PairWalker<'a, B> {
    fn new(left: &'a Compiled<B>, right: &'a Compiled<B>, maxlen: usize, max_configs: usize)
        -> Self {
        let seed = |cm: &Compiled<B>| {
            let mut levels: Vec<Vec<Config<B>>> = Vec::with_capacity(maxlen + 1);
            levels.push(vec![(cm.initial_state, cm.initial.clone())]);
            levels.resize_with(maxlen + 1, Vec::new);
            levels
        };
        PairWalker {
            left,
            right,
            maxlen,
            max_configs,
            levels_left: seed(left),
            levels_right: seed(right),
            path: Vec::new(),
            text: String::new(),
            text_lens: Vec::new(),
            budget_hit: None,
            checked: 0,
            best: None,
        }
    }

    fn dfs(&mut self, depth: usize) -> Result<(), Overflow> {
        if let Some((best_path, _, _, _)) = &self.best {
            if best_path.len() <= depth {
                return Ok(());
            }
        }
        let left_accepts = accepts(self.left, &self.levels_left[depth]);
        let right_accepts = accepts(self.right, &self.levels_right[depth]);
        self.checked += 1;
        if left_accepts != right_accepts {
            self.best = Some((self.path.clone(), self.text.clone(), left_accepts, right_accepts));
            return Ok(());
        }
        if depth == self.maxlen {
            return Ok(());
        }
        if self.levels_left[depth].is_empty() && self.levels_right[depth].is_empty() {
            // Both machines reject everything below; count those strings
            // without walking them.
            let below = strings_below(self.left.symbols.len(), self.maxlen - depth);
            self.checked = self.checked.saturating_add(below);
            return Ok(());
        }
        for symbol in 0..self.left.symbols.len() {
            let (head, tail) = self.levels_left.split_at_mut(depth + 1);
            step_set(self.left, &head[depth], symbol, &mut tail[0]).ok_or(Overflow)?;
            let (head, tail) = self.levels_right.split_at_mut(depth + 1);
            step_set(self.right, &head[depth], symbol, &mut tail[0]).ok_or(Overflow)?;
            let size = self.levels_left[depth + 1].len().max(self.levels_right[depth + 1].len());
            self.path.push(symbol);
            self.text_lens.push(self.text.len());
            self.text.push_str(&self.left.symbols[symbol]);
            if size > self.max_configs {
                let hit = Some((self.path.clone(), self.text.clone(), size));
                self.budget_hit = lesser_hit(self.budget_hit.take(), hit);
            } else {
                self.dfs(depth + 1)?;
            }
            self.path.pop();
            let len = self.text_lens.pop().expect("pushed above");
            self.text.truncate(len);
        }
        Ok(())
    }
}

fn equivalence_with<B: Backend>(
    left: &Compiled<B>,
    right: &Compiled<B>,
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<Result<EquivalenceResult, AnalysisError>, Overflow> {
    let mut walker = PairWalker::new(left, right, maxlen, opts.limits.max_configs);
    walker.dfs(0)?;
    if let Some(hit) = walker.budget_hit {
        return Ok(Err(budget_error(hit, opts.limits.max_configs)));
    }
    Ok(Ok(match walker.best {
        None => EquivalenceResult::Pass {
            strings_checked: walker.checked,
        },
        Some((_, input, left_accepts, right_accepts)) => EquivalenceResult::Disagreement {
            input,
            left_accepts,
            right_accepts,
        },
    }))
}

/// Compares two machines over the same alphabet on every string up to
/// `maxlen`, reporting the least disagreement if any. Always runs
/// single-threaded; `opts.jobs` is ignored.
pub fn equivalence(
    left: &Hva,
    right: &Hva,
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<EquivalenceResult, AnalysisError> {
    let mut left_sorted: Vec<&String> = left.def().alphabet.iter().collect();
    let mut right_sorted: Vec<&String> = right.def().alphabet.iter().collect();
    left_sorted.sort();
    right_sorted.sort();
    if left_sorted != right_sorted {
        return Err(AnalysisError::AlphabetMismatch {
            left: left.def().alphabet.clone(),
            right: right.def().alphabet.clone(),
        });
    }
    // Walk in the left machine's symbol order.
    let order = left.def().alphabet.clone();
    let int_pair = (
        compile::<IntBackend>(left, &order),
        compile::<IntBackend>(right, &order),
    );
    if let (Some(cl), Some(cr)) = int_pair {
        if let Ok(result) = equivalence_with(&cl, &cr, maxlen, opts) {
            return result;
        }
    }
    let cl = compile::<ExactBackend>(left, &order).expect("rational backend accepts every machine");
    let cr =
        compile::<ExactBackend>(right, &order).expect("rational backend accepts every machine");
    match equivalence_with(&cl, &cr, maxlen, opts) {
        Ok(result) => result,
        Err(Overflow) => unreachable!("rational arithmetic does not overflow"),
    }
}

// ---------------------------------------------------------------------------
// Growth bounds
// ---------------------------------------------------------------------------

/// The ceiling `m^(n+1) · k^n` on any entry of a dimension-`k` vector after
/// `n` steps, when every matrix entry and every initial-vector entry has
/// absolute value at most `m`.
pub fn entry_bound(m: &BigInt, k: usize, n: usize) -> BigInt {
    let n32 = u32::try_from(n).expect("step counts fit in u32");
    m.pow(n32 + 1) * BigInt::from(k).pow(n32)
}

/// The ceiling `s · (2·m^(n+1)·k^n + 1)^k` on the number of distinct
/// configurations of an `s`-state machine with integer entries after `n`
/// steps: each of the `k` entries lies in a centered integer interval.
pub fn config_count_bound(s: usize, m: &BigInt, k: usize, n: usize) -> BigInt {
    let diameter = entry_bound(m, k, n) * BigInt::from(2) + BigInt::from(1);
    BigInt::from(s) * diameter.pow(u32::try_from(k).expect("dimension fits in u32"))
}

/// Per-length growth observations against the guaranteed ceiling.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrowthStep {
    pub length: usize,
    /// Largest |entry| over every configuration reachable by any input of
    /// exactly this length (0 when nothing is reachable).
    pub max_abs_entry: Rational,
    /// `m^(length+1) · k^length`.
    pub entry_bound: Rational,
    /// `s · (2·m^(length+1)·k^length + 1)^k`; only meaningful (and only
    /// present) when every machine entry is an integer.
    pub config_count_bound: Option<BigInt>,
}

/// The audit's verdict: per-length maxima, the bound parameters, and which
/// premises the machine satisfies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub machine: String,
    /// Largest absolute matrix entry, floored at 1, so matrices satisfy
    /// the "entries within [-m, m]" premise by construction.
    pub m: Rational,
    pub dimension: usize,
    pub states: usize,
    /// True when the initial vector's entries also lie within [-m, m];
    /// the entry bound is guaranteed (and enforced) only then.
    pub entry_premise: bool,
    /// True when every matrix and initial-vector entry is an integer.
    pub integer_machine: bool,
    pub steps: Vec<GrowthStep>,
}

struct AuditVisit<B: Backend> {
    per_depth: Vec<<B as Backend>::Abs>,
}

impl<B: Backend> Visit<B> for AuditVisit<B> {
    fn node(&mut self, path: &[usize], _text: &str, configs: &[Config<B>], _accepted: bool)
        -> Action {
        let depth = path.len();
        for (_, vector) in configs {
            for entry in vector {
                let a = B::abs(entry);
                if a > self.per_depth[depth] {
                    self.per_depth[depth] = a;
                }
            }
        }
        if configs.is_empty() {
            Action::Skip
        } else {
            Action::Continue
        }
    }
}

fn audit_with<B: Backend>(
    cm: &Compiled<B>,
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<Result<Vec<Rational>, AnalysisError>, Overflow> {
    // Always single-threaded: per-depth maxima are cheap to fold and the
    // walk is bounded by the same trie as enumeration.
    let serial = AnalysisOptions {
        limits: opts.limits,
        jobs: 1,
    };
    let (visitor, _, budget) = walk_all(cm, maxlen, &serial, || AuditVisit::<B> {
        per_depth: vec![B::abs_zero(); maxlen + 1],
    })?;
    if let Some(hit) = budget {
        return Ok(Err(budget_error(hit, opts.limits.max_configs)));
    }
    Ok(Ok(visitor.per_depth.iter().map(B::abs_to_rational).collect()))
}

/// Runs every string up to `maxlen`, recording the largest |entry| per
/// length, and checks the observations against `m^(n+1)·k^n` whenever the
/// machine satisfies the bound's premise. A violation is a hard error —
/// it would falsify the simulation, not the ceiling.
pub fn growth_audit(
    machine: &Hva,
    maxlen: usize,
    opts: &AnalysisOptions,
) -> Result<BoundReport, AnalysisError> {
    let def = machine.def();
    let mut max_matrix_entry = Rational::zero();
    let mut integer_machine = true;
    for tr in &def.transitions {
        for row in &tr.matrix {
            for entry in row {
                integer_machine &= entry.is_integer();
                let a = entry.abs();
                if a > max_matrix_entry {
                    max_matrix_entry = a;
                }
            }
        }
    }
    let mut max_initial_entry = Rational::zero();
    for entry in &def.initial_vector {
        integer_machine &= entry.is_integer();
        let a = entry.abs();
        if a > max_initial_entry {
            max_initial_entry = a;
        }
    }
    let m = if max_matrix_entry < Rational::one() {
        Rational::one()
    } else {
        max_matrix_entry
    };
    let entry_premise = max_initial_entry <= m;
    let k = def.dimension;
    let states = def.states.len();

    let observed = with_backends(
        machine,
        |cm| audit_with(cm, maxlen, opts),
        |cm| audit_with(cm, maxlen, opts),
    )?;

    let m_int = m.to_integer();
    let mut steps = Vec::with_capacity(maxlen + 1);
    for (n, max_abs_entry) in observed.into_iter().enumerate() {
        let n32 = u32::try_from(n).expect("lengths fit in u32");
        let bound = m.pow(n32 + 1) * Rational::from(BigInt::from(k)).pow(n32);
        if entry_premise && max_abs_entry > bound {
            return Err(AnalysisError::BoundViolation {
                machine: def.name.clone(),
                length: n,
                observed: max_abs_entry,
                bound,
            });
        }
        let config_count_bound = match (&m_int, integer_machine) {
            (Some(mi), true) => Some(config_count_bound(states, mi, k, n)),
            _ => None,
        };
        steps.push(GrowthStep {
            length: n,
            max_abs_entry,
            entry_bound: bound,
            config_count_bound,
        });
    }
    Ok(BoundReport {
        machine: def.name.clone(),
        m,
        dimension: k,
        states,
        entry_premise,
        integer_machine,
        steps,
    })
}

// ---------------------------------------------------------------------------
// Unary DFA extraction
// ---------------------------------------------------------------------------

/// A DFA over a one-symbol alphabet: a chain of `stem` states flowing into
/// a cycle of `period` states. State `i` is reached by exactly the inputs
/// of length `i` (mod the cycle once past the chain).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnaryDfa {
    pub initial: usize,
    pub accepting: Vec<bool>,
    /// Total successor map: `successor[i]` is the state after one more
    /// symbol from state `i`.
    pub successor: Vec<usize>,
    pub stem: usize,
    pub period: usize,
}

impl UnaryDfa {
    pub fn state_count(&self) -> usize {
        self.successor.len()
    }

    /// The state reached by the input of the given length.
    pub fn state_at(&self, length: usize) -> usize {
        if length < self.stem + self.period {
            length
        } else {
            self.stem + (length - self.stem) % self.period
        }
    }

    pub fn accepts_length(&self, length: usize) -> bool {
        self.accepting[self.state_at(length)]
    }
}

/// Result of the budgeted extraction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Extraction {
    Dfa(UnaryDfa),
    /// No configuration repeat among accepted lengths within the budget;
    /// the language may be finite, or its loop longer than the budget.
    Undetermined { lengths_simulated: usize },
}

/// Extracts a DFA from a deterministic machine over a one-symbol alphabet
/// by simulating lengths 0, 1, 2, ... up to `budget`.
///
/// Acceptance pins the vector to the initial vector, so two accepted
/// lengths sharing a state are a full configuration repeat; determinism
/// then makes everything periodic from the first such length `w1` with
/// period `p` (the gap). The DFA is a `w1`-state chain into a `p`-state
/// cycle, with accepting states read off the observed acceptances. Before
/// returning, the DFA is verified against direct simulation on every
/// length up to `2·budget`; a mismatch is a hard error (it would falsify
/// the implementation).
pub fn unary_dfa_extract(machine: &Hva, budget: usize) -> Result<Extraction, AnalysisError> {
    if machine.def().alphabet.len() != 1 {
        return Err(AnalysisError::NotUnary {
            alphabet: machine.def().alphabet.clone(),
        });
    }
    if !machine.is_deterministic() {
        return Err(AnalysisError::NotDeterministic {
            machine: machine.def().name.clone(),
        });
    }
    let order = machine.def().alphabet.clone();
    let cm = compile::<ExactBackend>(machine, &order)
        .expect("the rational backend accepts every machine");

    // Deterministic machines keep the configuration set at size <= 1.
    let mut configs = vec![(cm.initial_state, cm.initial.clone())];
    let mut scratch = Vec::new();
    let mut accepted_lengths: Vec<bool> = Vec::with_capacity(budget + 1);
    let mut first_accept_for_state: HashMap<usize, usize> = HashMap::new();
    let mut repeat: Option<(usize, usize)> = None;
    for length in 0..=budget {
        let accepted = accepts(&cm, &configs);
        accepted_lengths.push(accepted);
        if accepted {
            let state = configs[0].0;
            match first_accept_for_state.get(&state) {
                Some(&w1) => {
                    repeat = Some((w1, length));
                    break;
                }
                None => {
                    first_accept_for_state.insert(state, length);
                }
            }
        }
        if configs.is_empty() || length == budget {
            break;
        }
        step_set(&cm, &configs, 0, &mut scratch).expect("rational arithmetic does not overflow");
        std::mem::swap(&mut configs, &mut scratch);
    }

    let Some((w1, w2)) = repeat else {
        return Ok(Extraction::Undetermined {
            lengths_simulated: accepted_lengths.len(),
        });
    };
    let stem = w1;
    let period = w2 - w1;
    let states = stem + period;
    let mut successor: Vec<usize> = (1..states).collect();
    successor.push(stem);
    let accepting: Vec<bool> = (0..states).map(|i| accepted_lengths[i]).collect();
    let dfa = UnaryDfa {
        initial: 0,
        accepting,
        successor,
        stem,
        period,
    };

    // Post-verification against a fresh direct simulation.
    let mut configs = vec![(cm.initial_state, cm.initial.clone())];
    for length in 0..=(2 * budget) {
        let direct = accepts(&cm, &configs);
        if direct != dfa.accepts_length(length) {
            return Err(AnalysisError::DfaMismatch { length });
        }
        step_set(&cm, &configs, 0, &mut scratch).expect("rational arithmetic does not overflow");
        std::mem::swap(&mut configs, &mut scratch);
    }
    Ok(Extraction::Dfa(dfa))
}

// ---------------------------------------------------------------------------
