//! Stern-Brocot string encodings.
//!
//! The binary codec maps a string over {0, 1} to a pair of positive integers:
//! starting from [1, 1], a 0 adds the first entry into the second and a 1
//! adds the second into the first. Equivalently the pair is multiplied on
//! the right by M0 = [[1,1],[0,1]] or M1 = [[1,0],[1,1]]. Decoding walks the
//! tree back down: the larger entry tells which symbol came last, and equal
//! entries other than [1, 1] mean the vector encodes nothing.
//!
//! The k-ary generalization uses, for each symbol a_j, the k×k identity with
//! column j replaced by all ones, so reading a_j replaces entry j with the
//! sum of all entries. Starting from the all-ones vector, every nonempty
//! word leaves a unique strictly-largest entry (everything else is bounded
//! by a strict subset sum), which is what makes greedy decoding well defined
//! and the whole encoding injective. Symbols are indexed 0-based in code;
//! index j stands for the canonical symbol a_{j+1}.

use crate::linalg::{RMatrix, RVector};
use crate::rational::Rational;
use num_bigint::BigInt;
use num_traits::{One, Signed};
use std::fmt;

/// Errors from encoding and decoding.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodecError {
    /// Binary-codec input contained something other than '0' or '1'.
    NonBinarySymbol { position: usize, found: char },
    /// Generalized-codec input used a symbol index ≥ k.
    SymbolOutOfRange { position: usize, found: usize, k: usize },
    /// The generalized codec needs k ≥ 2.
    AlphabetTooSmall { k: usize },
    /// The vector's dimension does not match k.
    DimensionMismatch { expected: usize, found: usize },
    /// The vector is not the encoding of any string.
    InvalidEncoding(InvalidEncoding),
}

/// Why a vector fails to decode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InvalidEncoding {
    NotInteger,
    NotPositive,
    /// The maximum entry is shared, so no last symbol can be identified.
    TiedMaximum,
    /// Undoing the last symbol would drop an entry below 1.
    Underflow,
}

impl fmt::Display for CodecError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodecError::NonBinarySymbol { position, found } => {
                write!(f, "symbol {found:?} at position {position} is not 0 or 1")
            }
            CodecError::SymbolOutOfRange { position, found, k } => write!(
                f,
                "symbol index {found} at position {position} is out of range for k={k}"
            ),
            CodecError::AlphabetTooSmall { k } => {
                write!(f, "generalized encoding needs k >= 2, got {k}")
            }
            CodecError::DimensionMismatch { expected, found } => {
                write!(f, "vector has dimension {found}, expected {expected}")
            }
            CodecError::InvalidEncoding(reason) => {
                write!(f, "vector is not a valid encoding: {reason}")
            }
        }
    }
}

impl fmt::Display for InvalidEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvalidEncoding::NotInteger => "entries must be integers",
            InvalidEncoding::NotPositive => "entries must be positive",
            InvalidEncoding::TiedMaximum => "maximum entry is not unique",
            InvalidEncoding::Underflow => "undoing a symbol drops an entry below 1",
        })
    }
}

impl std::error::Error for CodecError {}

/// The two binary encoding matrices and their inverses.
pub struct SbMatrices {
    pub m0: RMatrix,
    pub m1: RMatrix,
    pub n0: RMatrix,
    pub n1: RMatrix,
}

/// M0, M1 and their inverses N0, N1.
pub fn sb_matrices() -> SbMatrices {
    SbMatrices {
        m0: RMatrix::from_i64_rows(&[&[1, 1], &[0, 1]]).unwrap(),
        m1: RMatrix::from_i64_rows(&[&[1, 0], &[1, 1]]).unwrap(),
        n0: RMatrix::from_i64_rows(&[&[1, -1], &[0, 1]]).unwrap(),
        n1: RMatrix::from_i64_rows(&[&[1, 0], &[-1, 1]]).unwrap(),
    }
}

/// Encodes a binary string into its pair.
pub fn sb_encode(word: &str) -> Result<RVector, CodecError> {
    let mut a = BigInt::one();
    let mut b = BigInt::one();
    for (position, c) in word.chars().enumerate() {
        match c {
            '0' => b += &a,
            '1' => a += &b,
            found => return Err(CodecError::NonBinarySymbol { position, found }),
        }
    }
    Ok(RVector::new(vec![Rational::from(a), Rational::from(b)])
        .expect("pair is nonempty"))
}

/// Decodes a pair back into the unique binary string that encodes it.
///
/// Errors unless the entries are positive integers reachable from [1, 1]:
/// at every backward step the strictly larger entry identifies the last
/// symbol, and equal entries other than [1, 1] are invalid.
pub fn sb_decode(vector: &RVector) -> Result<String, CodecError> {
    let [mut a, mut b]: [BigInt; 2] = integer_entries(vector, 2)?
        .try_into()
        .expect("dimension was checked");
    let mut word = Vec::new();
    let one = BigInt::one();
    while !(a.is_one() && b.is_one()) {
        if a == b {
            return Err(CodecError::InvalidEncoding(InvalidEncoding::TiedMaximum));
        }
        if b > a {
            word.push('0');
            b -= &a;
            if b < one {
                return Err(CodecError::InvalidEncoding(InvalidEncoding::Underflow));
            }
        } else {
            word.push('1');
            a -= &b;
            if a < one {
                return Err(CodecError::InvalidEncoding(InvalidEncoding::Underflow));
            }
        }
    }
    word.reverse();
    Ok(word.into_iter().collect())
}

/// The k encoding matrices of the generalized codec and their inverses.
pub struct GsbFamily {
    k: usize,
    matrices: Vec<RMatrix>,
    inverses: Vec<RMatrix>,
}

impl GsbFamily {
    pub fn k(&self) -> usize {
        self.k
    }

    /// The matrix for symbol index `j` (canonical symbol a_{j+1}).
    pub fn matrix(&self, j: usize) -> &RMatrix {
        &self.matrices[j]
    }

    pub fn inverse(&self, j: usize) -> &RMatrix {
        &self.inverses[j]
    }

    pub fn matrices(&self) -> &[RMatrix] {
        &self.matrices
    }
}

/// Builds the matrix family for alphabet size `k ≥ 2`: matrix `j` is the
/// identity with column `j` replaced by all ones.
pub fn gsb_matrices(k: usize) -> Result<GsbFamily, CodecError> {
    if k < 2 {
        return Err(CodecError::AlphabetTooSmall { k });
    }
    let mut matrices = Vec::with_capacity(k);
    let mut inverses = Vec::with_capacity(k);
    for j in 0..k {
        let mut m = RMatrix::identity(k);
        for i in 0..k {
            m.set_entry(i, j, Rational::one());
        }
        inverses.push(m.inverse().expect("column-replacement matrices are invertible"));
        matrices.push(m);
    }
    Ok(GsbFamily { k, matrices, inverses })
}

/// Encodes a word (0-based symbol indices) over a k-symbol alphabet.
pub fn gsb_encode(word: &[usize], k: usize) -> Result<RVector, CodecError> {
    if k < 2 {
        return Err(CodecError::AlphabetTooSmall { k });
    }
    let mut entries = vec![BigInt::one(); k];
    for (position, &j) in word.iter().enumerate() {
        if j >= k {
            return Err(CodecError::SymbolOutOfRange { position, found: j, k });
        }
        let total: BigInt = entries.iter().sum();
        entries[j] = total;
    }
    Ok(RVector::new(entries.into_iter().map(Rational::from).collect())
        .expect("k >= 2"))
}

/// Decodes a vector back into the unique word (0-based symbol indices) that
/// encodes it.
///
/// Works backward from the vector: a valid nonempty encoding has a unique
/// maximum entry, whose position is the last symbol; undoing it replaces
/// that entry with itself minus the sum of all others. Errors if entries
/// are not positive integers, the maximum is tied, or an undo step drops
/// below 1.
pub fn gsb_decode(vector: &RVector, k: usize) -> Result<Vec<usize>, CodecError> {
    if k < 2 {
        return Err(CodecError::AlphabetTooSmall { k });
    }
    let mut entries = integer_entries(vector, k)?;
    let mut word = Vec::new();
    let one = BigInt::one();
    loop {
        if entries.iter().all(|e| e.is_one()) {
            word.reverse();
            return Ok(word);
        }
        let max = entries.iter().max().expect("k >= 2").clone();
        if entries.iter().filter(|&e| *e == max).count() > 1 {
            return Err(CodecError::InvalidEncoding(InvalidEncoding::TiedMaximum));
        }
        let j = entries.iter().position(|e| *e == max).expect("max exists");
        let rest: BigInt = entries.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, e)| e).sum();
        let undone = &max - &rest;
        if undone < one {
            return Err(CodecError::InvalidEncoding(InvalidEncoding::Underflow));
        }
        entries[j] = undone;
        word.push(j);
    }
}

/// Checks dimension, integrality, and positivity, returning plain integers.
fn integer_entries(vector: &RVector, k: usize) -> Result<Vec<BigInt>, CodecError> {
    if vector.dim() != k {
        return Err(CodecError::DimensionMismatch {
            expected: k,
            found: vector.dim(),
        });
    }
    vector
        .entries()
        .iter()
        .map(|e| {
            let n = e
                .to_integer()
                .ok_or(CodecError::InvalidEncoding(InvalidEncoding::NotInteger))?;
            if !n.is_positive() {
                return Err(CodecError::InvalidEncoding(InvalidEncoding::NotPositive));
            }
            Ok(n)
        })
        .collect()
}
