//! A gallery of worked machines, each paired with an independent
//! brute-force membership predicate over its language definition.
//!
//! The predicates deliberately share no code with the machines: they parse
//! the input string directly and decide membership arithmetically, so that
//! exhaustive machine-vs-predicate comparison is meaningful evidence.
//!
//! Entries (names as used by `by_name` and the CLI's `gallery:` refs):
//!
//! * `thm1_dim2`, `thm1_dim1` — deterministic non-blind machines, in
//!   dimensions 2 and 1, for {a^n b^p a^q : n = p or n = p+q} where runs are
//!   maximal. The dimension-2 machine counts with an integer-in-the-vector;
//!   the dimension-1 machine does the same with exponents of 2.
//! * `upow` — nondeterministic blind dimension-3 machine for the unary
//!   language {a^(n + 2^n) : n ≥ 1}.
//! * `subsetsum_r` — nondeterministic blind dimension-5 machine for
//!   reversed-binary subset-sum instances `t#a_1#...#a_n#` (every number
//!   written least-significant-bit first) with some subset of the a_i
//!   summing to t.
//! * `mpal_2`, `mpal_3` — deterministic blind machines for marked
//!   palindromes w#w^r over 2- and 3-symbol alphabets, using the
//!   generalized Stern-Brocot encoding forward and its inverse backward.
//!   Machine symbols are the digits "1".."l" plus "#".
//! * `pow` — deterministic blind dimension-3 machine for {a^n b^(2^n) : n ≥ 0}.
//! * `pow_r` — deterministic blind dimension-2 machine for
//!   {a^(2^n) b^n : n ≥ 0}; one matrix entry is 1/2, which is the point.

use crate::linalg::RMatrix;
use crate::machine::{Guard, Hva, HvaDef, TransitionDef};
use crate::rational::{rat, Rational};
use crate::sb::gsb_matrices;
use num_bigint::BigInt;

/// A gallery machine with its ground-truth membership predicate.
pub struct GalleryEntry {
    pub name: String,
    pub machine: Hva,
    /// Brute-force membership in the language, independent of the machine.
    pub reference: Box<dyn Fn(&str) -> bool + Send + Sync>,
    /// One-line description of the language and construction.
    pub notes: String,
}

impl GalleryEntry {
    pub fn alphabet(&self) -> &[String] {
        self.machine.alphabet()
    }
}

/// Errors from gallery constructors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GalleryError {
    /// The palindrome family needs an alphabet of 2 to 9 symbols (digit
    /// symbol names).
    BadAlphabetSize { l: usize },
    UnknownEntry { name: String },
}

impl std::fmt::Display for GalleryError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GalleryError::BadAlphabetSize { l } => {
                write!(f, "palindrome alphabet size must be 2..=9, got {l}")
            }
            GalleryError::UnknownEntry { name } => write!(f, "no gallery entry named {name:?}"),
        }
    }
}

impl std::error::Error for GalleryError {}

/// Names of all gallery entries, in registry order.
pub fn names() -> Vec<&'static str> {
    vec![
        "thm1_dim2",
        "thm1_dim1",
        "upow",
        "subsetsum_r",
        "mpal_2",
        "mpal_3",
        "pow",
        "pow_r",
    ]
}

/// Every gallery entry.
pub fn all() -> Vec<GalleryEntry> {
    vec![
        thm1_dim2(),
        thm1_dim1(),
        upow(),
        subsetsum_r(),
        mpal(2).expect("l=2 is valid"),
        mpal(3).expect("l=3 is valid"),
        pow(),
        pow_r(),
    ]
}

/// Looks an entry up by name.
pub fn by_name(name: &str) -> Result<GalleryEntry, GalleryError> {
    match name {
        "thm1_dim2" => Ok(thm1_dim2()),
        "thm1_dim1" => Ok(thm1_dim1()),
        "upow" => Ok(upow()),
        "subsetsum_r" => Ok(subsetsum_r()),
        "mpal_2" => Ok(mpal(2).expect("l=2 is valid")),
        "mpal_3" => Ok(mpal(3).expect("l=3 is valid")),
        "pow" => Ok(pow()),
        "pow_r" => Ok(pow_r()),
        _ => Err(GalleryError::UnknownEntry {
            name: name.to_owned(),
        }),
    }
}

fn build(def: HvaDef) -> Hva {
    def.try_into().expect("gallery machines validate")
}

fn t(from: &str, symbol: &str, guard: Guard, to: &str, matrix: &RMatrix) -> TransitionDef {
    TransitionDef {
        from: from.into(),
        symbol: symbol.into(),
        guard,
        to: to.into(),
        matrix: matrix.to_rows(),
    }
}

fn mat(rows: &[&[i64]]) -> RMatrix {
    RMatrix::from_i64_rows(rows).expect("static matrix")
}

/// Splits a string of maximal runs a^n b^p a^q; anything else is `None`.
fn runs_aba(s: &str) -> Option<(usize, usize, usize)> {
    let bytes = s.as_bytes();
    let n = bytes.iter().take_while(|&&b| b == b'a').count();
    let p = bytes[n..].iter().take_while(|&&b| b == b'b').count();
    let q = bytes[n + p..].iter().take_while(|&&b| b == b'a').count();
    (n + p + q == bytes.len()).then_some((n, p, q))
}

/// Membership in {a^n b^p a^q : n = p or n = p+q} with maximal runs.
pub fn thm1_member(s: &str) -> bool {
    matches!(runs_aba(s), Some((n, p, q)) if n == p || n == p + q)
}

/// Deterministic dimension-2 machine for [`thm1_member`]'s language.
///
/// The first entry carries n minus the symbols matched against it so far;
/// the machine watches for the vector returning home exactly when the b-run
/// ends, which distinguishes the n = p clause (trailing a's are then free)
/// from the n = p + q clause (trailing a's keep decrementing).
pub fn thm1_dim2() -> GalleryEntry {
    let inc = mat(&[&[1, 0], &[1, 1]]);
    let dec = mat(&[&[1, 0], &[-1, 1]]);
    let id = RMatrix::identity(2);
    let def = HvaDef {
        name: "thm1_dim2".into(),
        dimension: 2,
        alphabet: vec!["a".into(), "b".into()],
        states: vec![
            "first_a".into(),
            "bs".into(),
            "equal_tail".into(),
            "second_a".into(),
        ],
        initial_state: "first_a".into(),
        accept_states: vec![
            "first_a".into(),
            "bs".into(),
            "equal_tail".into(),
            "second_a".into(),
        ],
        deterministic: true,
        blind: false,
        initial_vector: vec![Rational::one(), Rational::one()],
        transitions: vec![
            t("first_a", "a", Guard::Any, "first_a", &inc),
            t("first_a", "b", Guard::Any, "bs", &dec),
            t("bs", "b", Guard::Any, "bs", &dec),
            // The guard outcome on the first trailing 'a' decides which
            // clause can still hold.
            t("bs", "a", Guard::Eq, "equal_tail", &id),
            t("bs", "a", Guard::Neq, "second_a", &dec),
            t("equal_tail", "a", Guard::Any, "equal_tail", &id),
            t("second_a", "a", Guard::Any, "second_a", &dec),
        ],
    };
    GalleryEntry {
        name: "thm1_dim2".into(),
        machine: build(def),
        reference: Box::new(thm1_member),
        notes: "dimension-2 deterministic machine for {a^n b^p a^q : n=p or n=p+q}".into(),
    }
}

/// Dimension-1 variant of [`thm1_dim2`]: doubling and halving a scalar
/// replaces incrementing and decrementing a vector entry.
pub fn thm1_dim1() -> GalleryEntry {
    let double = RMatrix::from_rows(vec![vec![Rational::from(2)]]).unwrap();
    let halve = RMatrix::from_rows(vec![vec![rat(1, 2).unwrap()]]).unwrap();
    let id = RMatrix::identity(1);
    let def = HvaDef {
        name: "thm1_dim1".into(),
        dimension: 1,
        alphabet: vec!["a".into(), "b".into()],
        states: vec![
            "first_a".into(),
            "bs".into(),
            "equal_tail".into(),
            "second_a".into(),
        ],
        initial_state: "first_a".into(),
        accept_states: vec![
            "first_a".into(),
            "bs".into(),
            "equal_tail".into(),
            "second_a".into(),
        ],
        deterministic: true,
        blind: false,
        initial_vector: vec![Rational::one()],
        transitions: vec![
            t("first_a", "a", Guard::Any, "first_a", &double),
            t("first_a", "b", Guard::Any, "bs", &halve),
            t("bs", "b", Guard::Any, "bs", &halve),
            t("bs", "a", Guard::Eq, "equal_tail", &id),
            t("bs", "a", Guard::Neq, "second_a", &halve),
            t("equal_tail", "a", Guard::Any, "equal_tail", &id),
            t("second_a", "a", Guard::Any, "second_a", &halve),
        ],
    };
    GalleryEntry {
        name: "thm1_dim1".into(),
        machine: build(def),
        reference: Box::new(thm1_member),
        notes: "dimension-1 variant of thm1_dim2 using exact doubling/halving".into(),
    }
}

/// Membership in {a^(n + 2^n) : n ≥ 1}.
pub fn upow_member(s: &str) -> bool {
    if !s.bytes().all(|b| b == b'a') {
        return false;
    }
    let len = s.len() as u128;
    for n in 1u32.. {
        let Some(p) = 1u128.checked_shl(n) else { return false };
        let v = n as u128 + p;
        if v == len {
            return true;
        }
        if v > len {
            return false;
        }
    }
    unreachable!()
}

/// Nondeterministic blind dimension-3 machine for {a^(n + 2^n) : n ≥ 1}.
///
/// The first phase doubles two entries per symbol; a nondeterministic
/// switch spends one symbol on the identity; the second phase decrements
/// the first entry per symbol. A branch lands home exactly when the guess
/// splits the input as n, 1, 2^n - 1.
pub fn upow() -> GalleryEntry {
    let u1 = mat(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
    let u2 = mat(&[&[1, 0, 0], &[0, 0, 0], &[-1, 1, 1]]);
    let id = RMatrix::identity(3);
    let def = HvaDef {
        name: "upow".into(),
        dimension: 3,
        alphabet: vec!["a".into()],
        states: vec!["start".into(), "grow".into(), "shrink".into()],
        initial_state: "start".into(),
        accept_states: vec!["shrink".into()],
        deterministic: false,
        blind: true,
        initial_vector: vec![Rational::one(), Rational::one(), Rational::one()],
        transitions: vec![
            t("start", "a", Guard::Any, "grow", &u1),
            t("grow", "a", Guard::Any, "grow", &u1),
            t("grow", "a", Guard::Any, "shrink", &id),
            t("shrink", "a", Guard::Any, "shrink", &u2),
        ],
    };
    GalleryEntry {
        name: "upow".into(),
        machine: build(def),
        reference: Box::new(upow_member),
        notes: "nondeterministic blind dimension-3 machine for {a^(n+2^n) : n>=1}".into(),
    }
}

/// Parses `t#a_1#...#a_n#` (binary numbers, least-significant-bit first,
/// every segment nonempty, n ≥ 1) and checks whether some subset of the
/// a_i sums to t.
pub fn subsetsum_r_member(s: &str) -> bool {
    if !s.ends_with('#') {
        return false;
    }
    let mut values = Vec::new();
    for segment in s[..s.len() - 1].split('#') {
        if segment.is_empty() || !segment.bytes().all(|b| b == b'0' || b == b'1') {
            return false;
        }
        let mut v = BigInt::from(0);
        for (i, b) in segment.bytes().enumerate() {
            if b == b'1' {
                v += BigInt::from(1) << i;
            }
        }
        values.push(v);
    }
    if values.len() < 2 {
        return false;
    }
    let target = &values[0];
    let items = &values[1..];
    // Desk-scale inputs: enumerate subsets outright.
    (0u64..1 << items.len()).any(|mask| {
        let sum: BigInt = items
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, v)| v)
            .sum();
        sum == *target
    })
}

/// Nondeterministic blind dimension-5 machine for reversed-binary
/// subset-sum strings.
///
/// Entries: selected-sum-minus-t accumulator, current-block accumulator,
/// two power-of-two counters that double per bit and reset at '#', and a
/// constant 1. Each block is nondeterministically added into the running
/// difference or skipped with identity steps; the vector is home at the
/// end exactly when the selected blocks sum to t.
pub fn subsetsum_r() -> GalleryEntry {
    let t0 = mat(&[
        &[1, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1],
    ]);
    let t1 = mat(&[
        &[1, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0],
        &[1, 0, 1, 1, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1],
    ]);
    let hash = mat(&[
        &[1, 0, 0, 0, 0],
        &[-1, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0],
        &[0, 0, 0, 0, 0],
        &[0, 0, 1, 1, 1],
    ]);
    let a0 = t0.clone();
    let a1 = mat(&[
        &[1, 0, 0, 0, 0],
        &[0, 1, 0, 0, 0],
        &[0, 1, 1, 1, 0],
        &[0, 0, 1, 1, 0],
        &[0, 0, 0, 0, 1],
    ]);
    let id = RMatrix::identity(5);
    let zero = Rational::zero();
    let one = Rational::one();
    let def = HvaDef {
        name: "subsetsum_r".into(),
        dimension: 5,
        alphabet: vec!["0".into(), "1".into(), "#".into()],
        states: vec![
            "t_first".into(),
            "t_rest".into(),
            "first_block".into(),
            "select".into(),
            "skip".into(),
            "block_done".into(),
        ],
        initial_state: "t_first".into(),
        accept_states: vec!["block_done".into()],
        deterministic: false,
        blind: true,
        initial_vector: vec![zero.clone(), zero, one.clone(), one.clone(), one],
        transitions: vec![
            // Target number: at least one bit before the first '#'.
            t("t_first", "0", Guard::Any, "t_rest", &t0),
            t("t_first", "1", Guard::Any, "t_rest", &t1),
            t("t_rest", "0", Guard::Any, "t_rest", &t0),
            t("t_rest", "1", Guard::Any, "t_rest", &t1),
            t("t_rest", "#", Guard::Any, "first_block", &hash),
            // Each block: guess select-or-skip on its first bit; blocks are
            // nonempty and every complete block ends at '#'.
            t("first_block", "0", Guard::Any, "select", &a0),
            t("first_block", "1", Guard::Any, "select", &a1),
            t("first_block", "0", Guard::Any, "skip", &id),
            t("first_block", "1", Guard::Any, "skip", &id),
            t("select", "0", Guard::Any, "select", &a0),
            t("select", "1", Guard::Any, "select", &a1),
            t("select", "#", Guard::Any, "block_done", &hash),
            t("skip", "0", Guard::Any, "skip", &id),
            t("skip", "1", Guard::Any, "skip", &id),
            t("skip", "#", Guard::Any, "block_done", &hash),
            t("block_done", "0", Guard::Any, "select", &a0),
            t("block_done", "1", Guard::Any, "select", &a1),
            t("block_done", "0", Guard::Any, "skip", &id),
            t("block_done", "1", Guard::Any, "skip", &id),
        ],
    };
    GalleryEntry {
        name: "subsetsum_r".into(),
        machine: build(def),
        reference: Box::new(subsetsum_r_member),
        notes: "nondeterministic blind dimension-5 machine for reversed-binary subset sum".into(),
    }
}

/// Membership in {w # reverse(w)} over the digit alphabet {1..l}.
pub fn mpal_member(s: &str, l: usize) -> bool {
    let digit_ok = |c: char| c.is_ascii_digit() && c != '0' && (c as usize - '0' as usize) <= l;
    let Some((left, right)) = s.split_once('#') else {
        return false;
    };
    if left.contains('#') || right.contains('#') {
        return false;
    }
    if !left.chars().all(digit_ok) || !right.chars().all(digit_ok) {
        return false;
    }
    right.chars().eq(left.chars().rev())
}

/// Deterministic blind machine for marked palindromes over {1..l, #}.
///
/// Before the marker each symbol applies its Stern-Brocot family matrix;
/// after the marker each applies the exact inverse. Reading w # w^r undoes
/// the encoding factor by factor, so the vector is home exactly at a match.
pub fn mpal(l: usize) -> Result<GalleryEntry, GalleryError> {
    if !(2..=9).contains(&l) {
        return Err(GalleryError::BadAlphabetSize { l });
    }
    let fam = gsb_matrices(l).expect("l >= 2");
    let mut alphabet: Vec<String> = (1..=l).map(|d| d.to_string()).collect();
    alphabet.push("#".into());
    let mut transitions = Vec::new();
    for j in 0..l {
        let sym = (j + 1).to_string();
        transitions.push(t("enc", &sym, Guard::Any, "enc", fam.matrix(j)));
        transitions.push(t("dec", &sym, Guard::Any, "dec", fam.inverse(j)));
    }
    transitions.push(t("enc", "#", Guard::Any, "dec", &RMatrix::identity(l)));
    let def = HvaDef {
        name: format!("mpal_{l}"),
        dimension: l,
        alphabet,
        states: vec!["enc".into(), "dec".into()],
        initial_state: "enc".into(),
        accept_states: vec!["dec".into()],
        deterministic: true,
        blind: true,
        initial_vector: vec![Rational::one(); l],
        transitions,
    };
    Ok(GalleryEntry {
        name: format!("mpal_{l}"),
        machine: build(def),
        reference: Box::new(move |s| mpal_member(s, l)),
        notes: format!(
            "deterministic blind dimension-{l} machine for marked palindromes w#reverse(w)"
        ),
    })
}

/// Membership in {a^n b^(2^n) : n ≥ 0}.
pub fn pow_member(s: &str) -> bool {
    let n = s.bytes().take_while(|&b| b == b'a').count();
    let m = s.len() - n;
    if !s.as_bytes()[n..].iter().all(|&b| b == b'b') {
        return false;
    }
    u32::try_from(n)
        .ok()
        .and_then(|n| 1u128.checked_shl(n))
        .is_some_and(|p| p == m as u128)
}

/// Deterministic blind dimension-3 machine for {a^n b^(2^n) : n ≥ 0}.
///
/// Doubling per 'a' builds 2^n; the first 'b' is a state-tracked identity
/// step, and every further 'b' decrements, so exactly 2^n b's return home.
pub fn pow() -> GalleryEntry {
    let u1 = mat(&[&[1, 1, 0], &[1, 1, 0], &[0, 0, 1]]);
    let u2 = mat(&[&[1, 0, 0], &[0, 0, 0], &[-1, 1, 1]]);
    let id = RMatrix::identity(3);
    let def = HvaDef {
        name: "pow".into(),
        dimension: 3,
        alphabet: vec!["a".into(), "b".into()],
        states: vec!["grow".into(), "shrink".into()],
        initial_state: "grow".into(),
        accept_states: vec!["shrink".into()],
        deterministic: true,
        blind: true,
        initial_vector: vec![Rational::one(), Rational::one(), Rational::one()],
        transitions: vec![
            t("grow", "a", Guard::Any, "grow", &u1),
            t("grow", "b", Guard::Any, "shrink", &id),
            t("shrink", "b", Guard::Any, "shrink", &u2),
        ],
    };
    GalleryEntry {
        name: "pow".into(),
        machine: build(def),
        reference: Box::new(pow_member),
        notes: "deterministic blind dimension-3 machine for {a^n b^(2^n) : n>=0}".into(),
    }
}

/// Membership in {a^(2^n) b^n : n ≥ 0}.
pub fn pow_r_member(s: &str) -> bool {
    let m = s.bytes().take_while(|&b| b == b'a').count();
    let n = s.len() - m;
    if !s.as_bytes()[m..].iter().all(|&b| b == b'b') {
        return false;
    }
    u32::try_from(n)
        .ok()
        .and_then(|n| 1u128.checked_shl(n))
        .is_some_and(|p| p == m as u128)
}

/// Deterministic blind dimension-2 machine for {a^(2^n) b^n : n ≥ 0}.
///
/// The first 'a' is a state-tracked identity step; each further 'a' adds 1,
/// so the first entry holds the a-count; each 'b' halves it. The vector is
/// home exactly when the a-count is 2^(number of b's). The halving matrix
/// has a 1/2 entry, which no integer-matrix machine of this kind can match.
pub fn pow_r() -> GalleryEntry {
    let inc = mat(&[&[1, 0], &[1, 1]]);
    let halve = RMatrix::from_rows(vec![
        vec![rat(1, 2).unwrap(), Rational::zero()],
        vec![Rational::zero(), Rational::one()],
    ])
    .unwrap();
    let id = RMatrix::identity(2);
    let def = HvaDef {
        name: "pow_r".into(),
        dimension: 2,
        alphabet: vec!["a".into(), "b".into()],
        states: vec!["start".into(), "a_run".into(), "b_run".into()],
        initial_state: "start".into(),
        accept_states: vec!["a_run".into(), "b_run".into()],
        deterministic: true,
        blind: true,
        initial_vector: vec![Rational::one(), Rational::one()],
        transitions: vec![
            t("start", "a", Guard::Any, "a_run", &id),
            t("a_run", "a", Guard::Any, "a_run", &inc),
            t("a_run", "b", Guard::Any, "b_run", &halve),
            t("b_run", "b", Guard::Any, "b_run", &halve),
        ],
    };
    GalleryEntry {
        name: "pow_r".into(),
        machine: build(def),
        reference: Box::new(pow_r_member),
        notes: "deterministic blind dimension-2 machine for {a^(2^n) b^n : n>=0}".into(),
    }
}
