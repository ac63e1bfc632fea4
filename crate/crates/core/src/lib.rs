//! Homing vector automata over exact rational arithmetic.
//!
//! A homing vector automaton is a finite automaton that carries a
//! `k`-dimensional rational row vector. Reading a symbol takes one
//! transition: the transition's guard first tests whether the vector
//! currently equals the machine's initial vector (`eq`), differs from it
//! (`neq`), or is ignored (`any`), and the transition's `k`×`k` matrix then
//! multiplies the vector on the right. An input is accepted when it ends in
//! an accept state with the vector exactly back at its initial value.
//!
//! The crate provides:
//!
//! * [`rational`] and [`linalg`] — exact arbitrary-precision rationals and
//!   the row-vector/matrix operations everything else builds on. No
//!   floating point takes part in machine semantics anywhere.
//! * [`machine`] — the machine definition format ([`HvaDef`], JSON
//!   mirrored), validation, and the run semantics for all four variants:
//!   deterministic or nondeterministic, blind (guard-free) or non-blind.
//!   Nondeterministic runs are simulated over deduplicated configuration
//!   sets with a size budget.
//! * [`sb`] — the Stern–Brocot string encodings: the binary form with its
//!   matrix pair, and the generalized form over `l`-symbol alphabets whose
//!   decode works by a unique-maximum property of the encoded vector.
//! * [`gallery`] — worked machines for specific languages, each paired
//!   with an independent brute-force membership predicate so exhaustive
//!   machine-vs-predicate comparison is meaningful evidence.
//! * [`counter`] — real-time deterministic counter automata (blind or
//!   zero-testing) and their compilation into homing vector automata.
//! * [`analysis`] — desk-scale verification: language enumeration,
//!   machine-vs-predicate cross-checks, machine-vs-machine equivalence up
//!   to a length cap, entry-growth audits against the guaranteed
//!   `m^(n+1)·k^n` ceiling, and DFA extraction for deterministic machines
//!   over one-symbol alphabets.

pub mod analysis;
pub mod counter;
pub mod gallery;
pub mod linalg;
pub mod machine;
pub mod rational;
pub mod sb;

pub use linalg::{RMatrix, RVector};
pub use machine::{Configuration, Guard, Hva, HvaDef, RunLimits, TransitionDef};
pub use rational::{rat, Rational};
