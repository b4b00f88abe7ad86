//! The 3-qubit and 7-qubit (Steane) codes: codewords, stabilizers, encoding,
//! logical readout, syndrome extraction and memory correction.
//!
//! Codeword bitstrings and stabilizer strings share one position order:
//! position `p` of a block is the block's `p`-th listed physical qubit. For a
//! lone block of `n` qubits that is qubit `n - 1 - p`, so the strings read as
//! ordinary kets.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Serialize, Serializer};
use serde_json::json;

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};
use crate::statevec::StateVector;

/// Tolerance on `|alpha|^2 + |beta|^2 = 1` for encoder inputs.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-10;
/// A stabilizer expectation this close to `+-1` counts as a definite eigenvalue.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CodeName {
    ThreeBit,
    SevenBit,
}

impl CodeName {
    pub fn as_str(self) -> &'static str {
        match self {
            CodeName::ThreeBit => "three_bit",
            CodeName::SevenBit => "seven_bit",
        }
    }
}

impl fmt::Display for CodeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CodeName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "three_bit" | "3" | "three-bit" => Ok(CodeName::ThreeBit),
            "seven_bit" | "7" | "seven-bit" | "steane" => Ok(CodeName::SevenBit),
            other => Err(Error::UnknownCode(other.to_string())),
        }
    }
}

impl Serialize for CodeName {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Stabilizer eigenvalues in stabilizer order, each `+1` or `-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syndrome(Vec<i8>);

impl Syndrome {
    pub fn trivial(len: usize) -> Self {
        Self(vec![1; len])
    }

    pub fn from_values(values: Vec<i8>) -> Self {
        debug_assert!(values.iter().all(|v| *v == 1 || *v == -1));
        Self(values)
    }

    pub fn values(&self) -> &[i8] {
        &self.0
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(|&v| v == 1)
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &v in &self.0 {
            f.write_str(if v == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl FromStr for Syndrome {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '+' => Some(1),
                '-' => Some(-1),
                _ => None,
            })
            .collect::<Option<Vec<i8>>>()
            .map(Syndrome)
            .ok_or_else(|| Error::Internal(format!("bad syndrome string {s:?}")))
    }
}

impl Serialize for Syndrome {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedWord {
    pub sign: i8,
    /// Block-position order, position 0 first.
    pub bits: String,
}

impl SignedWord {
    fn positive(bits: impl Into<String>) -> Self {
        Self {
            sign: 1,
            bits: bits.into(),
        }
    }

    pub fn weight(&self) -> usize {
        self.bits.chars().filter(|&c| c == '1').count()
    }

    /// Whether position `p` holds a one.
    pub fn bit(&self, p: usize) -> bool {
        self.bits.as_bytes()[p] == b'1'
    }
}

impl fmt::Display for SignedWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", if self.sign >= 0 { '+' } else { '-' }, self.bits)
    }
}

/// Everything that defines one of the codes.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    pub name: CodeName,
    pub block_size: usize,
    pub codeword_zero: Vec<SignedWord>,
    pub codeword_one: Vec<SignedWord>,
    pub stabilizers: Vec<PauliString>,
    pub logical_x: PauliString,
    pub logical_z: PauliString,
    pub syndrome_table: BTreeMap<Syndrome, PauliString>,
    pub correctable_errors: Vec<Pauli>,
}

/// Logical amplitudes read off a block plus the weight found outside the code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogicalReadout {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub leakage: f64,
}

pub fn code_registry(name: &str) -> Result<CodeSpec> {
    Ok(CodeSpec::new(name.parse()?))
}

impl CodeSpec {
    pub fn new(name: CodeName) -> Self {
        match name {
            CodeName::ThreeBit => Self::three_bit(),
            CodeName::SevenBit => Self::seven_bit(),
        }
    }

    /// Even-weight words of length 3 for `|0_L>`, odd-weight ones for `|1_L>`;
    /// stabilized by `XXI` and `IXX`, so it corrects single phase flips.
    pub fn three_bit() -> Self {
        let words = |list: &[&str]| list.iter().map(|w| SignedWord::positive(*w)).collect();
        let stabilizers = vec!["XXI".parse().unwrap(), "IXX".parse().unwrap()];
        Self::assemble(
            CodeName::ThreeBit,
            3,
            words(&["000", "011", "101", "110"]),
            words(&["111", "100", "010", "001"]),
            stabilizers,
            "XII".parse().unwrap(),
            "ZZZ".parse().unwrap(),
            vec![Pauli::Z],
        )
    }

    /// Steane code built from the Hamming [7,4] parity checks on positions
    /// {4,5,6,7}, {2,3,6,7}, {1,3,5,7} (1-based). `|0_L>` sums the eight
    /// even-weight codewords, `|1_L>` their complements.
    pub fn seven_bit() -> Self {
        let checks: [[usize; 4]; 3] = [[3, 4, 5, 6], [1, 2, 5, 6], [0, 2, 4, 6]];
        // Rows spanning the even-weight subcode, in the order that lists the
        // words as 0, r1, r2, r1+r2, r3, ...
        let rows: [u8; 3] = [0b1010101, 0b0110011, 0b0001111];
        let to_bits = |w: u8| -> String {
            (0..7).map(|p| if w >> (6 - p) & 1 == 1 { '1' } else { '0' }).collect()
        };
        let zero: Vec<u8> = (0..8u8)
            .map(|k| {
                rows.iter()
                    .enumerate()
                    .filter(|(b, _)| k >> b & 1 == 1)
                    .fold(0u8, |acc, (_, r)| acc ^ r)
            })
            .collect();
        let codeword_zero = zero.iter().map(|&w| SignedWord::positive(to_bits(w))).collect();
        let codeword_one = zero.iter().map(|&w| SignedWord::positive(to_bits(!w & 0x7f))).collect();

        let stabilizers = [Pauli::X, Pauli::Z]
            .iter()
            .flat_map(|&kind| checks.iter().map(move |support| PauliString::on_support(7, support, kind)))
            .collect();
        Self::assemble(
            CodeName::SevenBit,
            7,
            codeword_zero,
            codeword_one,
            stabilizers,
            "XXXXXXX".parse().unwrap(),
            "ZZZZZZZ".parse().unwrap(),
            vec![Pauli::X, Pauli::Y, Pauli::Z],
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        name: CodeName,
        block_size: usize,
        codeword_zero: Vec<SignedWord>,
        codeword_one: Vec<SignedWord>,
        stabilizers: Vec<PauliString>,
        logical_x: PauliString,
        logical_z: PauliString,
        correctable_errors: Vec<Pauli>,
    ) -> Self {
        let mut spec = Self {
            name,
            block_size,
            codeword_zero,
            codeword_one,
            stabilizers,
            logical_x,
            logical_z,
            syndrome_table: BTreeMap::new(),
            correctable_errors,
        };
        let mut table = BTreeMap::new();
        table.insert(Syndrome::trivial(spec.stabilizers.len()), PauliString::identity(block_size));
        for pos in 0..block_size {
            for &kind in &spec.correctable_errors {
                let error = PauliString::single(block_size, pos, kind);
                let previous = table.insert(spec.pauli_syndrome(&error), error);
                debug_assert!(previous.is_none(), "single-qubit syndromes must be distinct");
            }
        }
        spec.syndrome_table = table;
        spec
    }

    pub fn num_stabilizers(&self) -> usize {
        self.stabilizers.len()
    }

    /// Syndrome a block-local Pauli produces on a code state, from commutation
    /// with each stabilizer.
    pub fn pauli_syndrome(&self, error: &PauliString) -> Syndrome {
        Syndrome(
            self.stabilizers
                .iter()
                .map(|s| if s.commutes_with(error) { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn codewords(&self, logical: bool) -> &[SignedWord] {
        if logical {
            &self.codeword_one
        } else {
            &self.codeword_zero
        }
    }

    /// Basis terms of the normalized codeword `|logical_L>` placed on `qubits`
    /// (position `p` on `qubits[p]`): `(physical index, amplitude)`.
    pub fn codeword_terms(&self, logical: bool, qubits: &[usize]) -> Vec<(usize, f64)> {
        let words = self.codewords(logical);
        let norm = 1.0 / (words.len() as f64).sqrt();
        words
            .iter()
            .map(|w| {
                let index = qubits
                    .iter()
                    .enumerate()
                    .filter(|(p, _)| w.bit(*p))
                    .map(|(_, &q)| 1usize << q)
                    .sum();
                (index, f64::from(w.sign) * norm)
            })
            .collect()
    }

    /// Qubit list for a lone block: position `p` on qubit `n - 1 - p`.
    pub fn register_qubits(&self) -> Vec<usize> {
        (0..self.block_size).rev().collect()
    }

    /// JSON dump: name, n, signed codewords, stabilizers, logical operators and
    /// the syndrome table.
    pub fn to_json(&self) -> serde_json::Value {
        let words = |ws: &[SignedWord]| ws.iter().map(|w| w.to_string()).collect::<Vec<_>>();
        let table: serde_json::Map<String, serde_json::Value> = self
            .syndrome_table
            .iter()
            .map(|(s, c)| (s.to_string(), json!(c.to_string())))
            .collect();
        json!({
            "name": self.name.as_str(),
            "n": self.block_size,
            "codewords": {
                "zero": words(&self.codeword_zero),
                "one": words(&self.codeword_one),
            },
            "stabilizers": self.stabilizers.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "logical_x": self.logical_x.to_string(),
            "logical_z": self.logical_z.to_string(),
            "syndrome_table": table,
            "correctable_errors": self.correctable_errors.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// `alpha|0_L> + beta|1_L>` on a lone block.
pub fn encode(code: &CodeSpec, alpha: Complex64, beta: Complex64) -> Result<StateVector> {
    let total = alpha.norm_sqr() + beta.norm_sqr();
    if (total - 1.0).abs() > AMPLITUDE_TOLERANCE {
        return Err(Error::NotNormalized(total));
    }
    let qubits = code.register_qubits();
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << code.block_size];
    for (logical, coeff) in [(false, alpha), (true, beta)] {
        for (index, amp) in code.codeword_terms(logical, &qubits) {
            amps[index] += coeff * amp;
        }
    }
    StateVector::from_amplitudes(code.block_size, amps)
}

/// Overlaps of a lone-block state with the two normalized codewords.
pub fn decode_logical(code: &CodeSpec, state: &StateVector) -> Result<LogicalReadout> {
    if state.num_qubits() != code.block_size {
        return Err(Error::DimensionMismatch {
            left: state.num_qubits(),
            right: code.block_size,
        });
    }
    let qubits = code.register_qubits();
    let overlap = |logical: bool| -> Complex64 {
        code.codeword_terms(logical, &qubits)
            .into_iter()
            .map(|(index, amp)| state.amplitude(index) * amp)
            .sum()
    };
    let alpha = overlap(false);
    let beta = overlap(true);
    let leakage = (state.norm_sqr() - alpha.norm_sqr() - beta.norm_sqr()).max(0.0);
    Ok(LogicalReadout { alpha, beta, leakage })
}

fn stabilizer_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Measures every stabilizer of the block on `qubits`, in order.
pub fn extract_block_syndrome(
    code: &CodeSpec,
    state: &StateVector,
    qubits: &[usize],
    seed: u64,
) -> Result<(Syndrome, StateVector)> {
    if qubits.len() != code.block_size {
        return Err(Error::Layout(format!(
            "{} qubits given for a block of {}",
            qubits.len(),
            code.block_size
        )));
    }
    let mut current = state.clone();
    let mut values = Vec::with_capacity(code.num_stabilizers());
    for (k, stabilizer) in code.stabilizers.iter().enumerate() {
        let m = current.measure_observable(
            &stabilizer.on_qubits(qubits),
            &stabilizer.to_string(),
            stabilizer_seed(seed, k),
        )?;
        values.push(m.eigenvalue);
        current = m.state;
    }
    Ok((Syndrome(values), current))
}

/// Measures the stabilizers of a state that spans exactly one block.
pub fn extract_syndrome(code: &CodeSpec, state: &StateVector, seed: u64) -> Result<(Syndrome, StateVector)> {
    if state.num_qubits() != code.block_size {
        return Err(Error::DimensionMismatch {
            left: state.num_qubits(),
            right: code.block_size,
        });
    }
    extract_block_syndrome(code, state, &code.register_qubits(), seed)
}

/// Syndrome read from stabilizer expectations without disturbing the state;
/// `None` when some stabilizer has no definite value.
pub fn definite_block_syndrome(code: &CodeSpec, state: &StateVector, qubits: &[usize]) -> Option<Syndrome> {
    code.stabilizers
        .iter()
        .map(|s| {
            let e = state.expectation(&s.on_qubits(qubits));
            if (e - 1.0).abs() <= EIGENVALUE_TOLERANCE {
                Some(1)
            } else if (e + 1.0).abs() <= EIGENVALUE_TOLERANCE {
                Some(-1)
            } else {
                None
            }
        })
        .collect::<Option<Vec<i8>>>()
        .map(Syndrome)
}

/// Syndrome-table correction of the block on `qubits`, as for an idle memory.
pub fn correct_block(code: &CodeSpec, state: &StateVector, qubits: &[usize], seed: u64) -> Result<StateVector> {
    let (syndrome, mut corrected) = extract_block_syndrome(code, state, qubits, seed)?;
    let correction = code
        .syndrome_table
        .get(&syndrome)
        .ok_or_else(|| Error::UnknownSyndrome(syndrome.to_string()))?;
    corrected.apply_pauli(&correction.on_qubits(qubits))?;
    let (residual, _) = extract_block_syndrome(code, &corrected, qubits, seed.wrapping_add(1))?;
    if !residual.is_trivial() {
        return Err(Error::ResidualSyndrome {
            syndrome: residual.to_string(),
        });
    }
    Ok(corrected)
}

/// [`correct_block`] on a state that spans exactly one block.
pub fn correct_memory(code: &CodeSpec, state: &StateVector, seed: u64) -> Result<StateVector> {
    if state.num_qubits() != code.block_size {
        return Err(Error::DimensionMismatch {
            left: state.num_qubits(),
            right: code.block_size,
        });
    }
    correct_block(code, state, &code.register_qubits(), seed)
}
