use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const UNITARITY_TOLERANCE: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

/// A named `2^k x 2^k` unitary, row-major.
///
/// Row/column index bit `k - 1 - b` belongs to the `b`-th target the gate is
/// applied to, so the first listed target is the most significant.
#[derive(Clone, PartialEq)]
pub struct GateMatrix {
    name: String,
    arity: usize,
    entries: Vec<Complex64>,
}

impl GateMatrix {
    pub fn new(name: impl Into<String>, arity: usize, entries: Vec<Complex64>) -> Result<Self> {
        let name = name.into();
        let dim = 1usize << arity;
        if arity == 0 || entries.len() != dim * dim {
            return Err(Error::NonUnitary {
                name,
                deviation: f64::INFINITY,
            });
        }
        let gate = Self {
            name,
            arity,
            entries,
        };
        let deviation = gate.unitarity_deviation();
        if deviation > UNITARITY_TOLERANCE {
            return Err(Error::NonUnitary {
                name: gate.name,
                deviation,
            });
        }
        Ok(gate)
    }

    /// Builds a gate the caller knows to be unitary.
    fn trusted(name: &str, arity: usize, entries: Vec<Complex64>) -> Self {
        let gate = Self {
            name: name.to_string(),
            arity,
            entries,
        };
        debug_assert!(gate.unitarity_deviation() <= UNITARITY_TOLERANCE);
        gate
    }

    pub fn identity(arity: usize) -> Self {
        let dim = 1usize << arity;
        let mut entries = vec![ZERO; dim * dim];
        for k in 0..dim {
            entries[k * dim + k] = ONE;
        }
        Self::trusted("I", arity, entries)
    }

    pub fn x() -> Self {
        Self::trusted("X", 1, vec![ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> Self {
        Self::trusted("Y", 1, vec![ZERO, -I, I, ZERO])
    }

    pub fn z() -> Self {
        Self::trusted("Z", 1, vec![ONE, ZERO, ZERO, -ONE])
    }

    pub fn h() -> Self {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        Self::trusted("H", 1, vec![h, h, h, -h])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn dim(&self) -> usize {
        1 << self.arity
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim() + col]
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Conjugate transpose; the name gains (or loses) a `_dg` suffix.
    pub fn adjoint(&self) -> Self {
        let dim = self.dim();
        let mut entries = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[c * dim + r] = self.entries[r * dim + c].conj();
            }
        }
        let name = match self.name.strip_suffix("_dg") {
            Some(base) => base.to_string(),
            None => format!("{}_dg", self.name),
        };
        Self {
            name,
            arity: self.arity,
            entries,
        }
    }

    /// Matrix product `self * rhs` (apply `rhs` first).
    pub fn compose(&self, rhs: &GateMatrix) -> Result<GateMatrix> {
        if self.arity != rhs.arity {
            return Err(Error::ArityMismatch {
                arity: self.arity,
                targets: rhs.arity,
            });
        }
        let dim = self.dim();
        let mut entries = vec![ZERO; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                entries[r * dim + c] = (0..dim)
                    .map(|k| self.entries[r * dim + k] * rhs.entries[k * dim + c])
                    .sum();
            }
        }
        Ok(Self {
            name: format!("{}*{}", self.name, rhs.name),
            arity: self.arity,
            entries,
        })
    }

    pub fn scaled(&self, phase: Complex64) -> Self {
        Self {
            name: self.name.clone(),
            arity: self.arity,
            entries: self.entries.iter().map(|&e| e * phase).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &GateMatrix) -> f64 {
        if self.arity != other.arity {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|M M^dagger - I|`.
    pub fn unitarity_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut worst = 0.0f64;
        for r in 0..dim {
            for c in 0..dim {
                let dot: Complex64 = (0..dim)
                    .map(|k| self.entries[r * dim + k] * self.entries[c * dim + k].conj())
                    .sum();
                let expected = if r == c { ONE } else { ZERO };
                worst = worst.max((dot - expected).norm());
            }
        }
        worst
    }

    /// Exactly the Pauli X matrix, which the kernels run as a swap.
    pub(crate) fn is_exact_x(&self) -> bool {
        self.arity == 1 && self.entries == [ZERO, ONE, ONE, ZERO]
    }

    pub(crate) fn as_2x2(&self) -> [Complex64; 4] {
        debug_assert_eq!(self.arity, 1);
        [self.entries[0], self.entries[1], self.entries[2], self.entries[3]]
    }
}

impl fmt::Debug for GateMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GateMatrix({}, arity {}, [", self.name, self.arity)?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}{:+}i", e.re, e.im)?;
        }
        write!(f, "])")
    }
}
