//! Single-qubit Paulis, Pauli strings and their bit-mask form.
//!
//! A [`PauliString`] is written like a ket: the leftmost letter acts on the
//! most significant qubit. Applied to a whole `n`-qubit register, letter `p`
//! (0-based from the left) acts on qubit `n - 1 - p`. Applied to a code block,
//! letter `p` acts on the block's `p`-th listed qubit.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const NONTRIVIAL: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub fn has_x(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    pub fn has_z(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub fn commutes_with(self, other: Pauli) -> bool {
        self == Pauli::I || other == Pauli::I || self == other
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Pauli> {
        match c {
            'I' | 'i' | '_' => Some(Pauli::I),
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(Pauli::from_char), chars.next()) {
            (Some(p), None) if p != Pauli::I => Ok(p),
            _ => Err(Error::MalformedPauli(s.to_string())),
        }
    }
}

/// Tensor product of single-qubit Paulis, leftmost letter first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self(letters)
    }

    pub fn identity(len: usize) -> Self {
        Self(vec![Pauli::I; len])
    }

    /// `kind` at position `pos`, identity elsewhere.
    pub fn single(len: usize, pos: usize, kind: Pauli) -> Self {
        let mut letters = vec![Pauli::I; len];
        letters[pos] = kind;
        Self(letters)
    }

    /// `kind` on every position listed in `support`.
    pub fn on_support(len: usize, support: &[usize], kind: Pauli) -> Self {
        let mut letters = vec![Pauli::I; len];
        for &pos in support {
            letters[pos] = kind;
        }
        Self(letters)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn get(&self, pos: usize) -> Pauli {
        self.0[pos]
    }

    pub fn weight(&self) -> usize {
        self.0.iter().filter(|&&p| p != Pauli::I).count()
    }

    pub fn is_identity(&self) -> bool {
        self.weight() == 0
    }

    /// Symplectic commutation test; strings must have equal length.
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.len(), other.len());
        let anti = self
            .0
            .iter()
            .zip(&other.0)
            .filter(|(a, b)| !a.commutes_with(**b))
            .count();
        anti % 2 == 0
    }

    /// Letter-wise product with phases dropped.
    pub fn mul_unsigned(&self, other: &PauliString) -> PauliString {
        let letters = self
            .0
            .iter()
            .zip(&other.0)
            .map(|(&a, &b)| {
                let x = a.has_x() ^ b.has_x();
                let z = a.has_z() ^ b.has_z();
                match (x, z) {
                    (false, false) => Pauli::I,
                    (true, false) => Pauli::X,
                    (true, true) => Pauli::Y,
                    (false, true) => Pauli::Z,
                }
            })
            .collect();
        PauliString(letters)
    }

    /// Bit-mask form acting on `qubits`, where `qubits[p]` carries letter `p`.
    pub fn on_qubits(&self, qubits: &[usize]) -> PhysicalPauli {
        debug_assert_eq!(self.len(), qubits.len());
        let mut op = PhysicalPauli::identity();
        for (&q, &p) in qubits.iter().zip(&self.0) {
            op.push(q, p);
        }
        op
    }

    /// Bit-mask form on a whole register of `self.len()` qubits.
    pub fn on_register(&self) -> PhysicalPauli {
        let n = self.len();
        let qubits: Vec<usize> = (0..n).map(|p| n - 1 - p).collect();
        self.on_qubits(&qubits)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::MalformedPauli(s.to_string()));
        }
        s.chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .map(PauliString)
            .ok_or_else(|| Error::MalformedPauli(s.to_string()))
    }
}

impl Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// A Pauli operator on physical qubit indices, stored as X/Z bit masks.
///
/// Acting on a basis state: `P|i> = i^{#Y} (-1)^{popcount(i & z_mask)} |i ^ x_mask>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct PhysicalPauli {
    pub x_mask: usize,
    pub z_mask: usize,
    pub num_y: u32,
}

impl PhysicalPauli {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, kind: Pauli) -> Self {
        let mut op = Self::identity();
        op.push(qubit, kind);
        op
    }

    /// Tensor on one more letter. The qubit must not be occupied yet.
    pub fn push(&mut self, qubit: usize, kind: Pauli) {
        let bit = 1usize << qubit;
        debug_assert_eq!((self.x_mask | self.z_mask) & bit, 0);
        if kind.has_x() {
            self.x_mask |= bit;
        }
        if kind.has_z() {
            self.z_mask |= bit;
        }
        if kind == Pauli::Y {
            self.num_y += 1;
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    pub fn support_mask(&self) -> usize {
        self.x_mask | self.z_mask
    }

    /// Overall `i^{#Y}` factor.
    pub fn y_phase(&self) -> Complex64 {
        match self.num_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}
