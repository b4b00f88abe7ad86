//! Encoding of multi-block logical registers and induced logical action.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::ser::{Serialize, SerializeSeq, Serializer};

use crate::circuit::{BlockLayout, Circuit};
use crate::codes::{CodeSpec, AMPLITUDE_TOLERANCE};
use crate::error::{Error, Result};
use crate::statevec::StateVector;

/// Leakage allowed per column before a circuit counts as leaving the code.
pub const LEAKAGE_TOLERANCE: f64 = 1e-10;
/// Tolerance for logical matrix comparisons.
pub const MATRIX_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Which logical states the labels 0 and 1 name on every block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LogicalBasis {
    /// `0 -> |0_L>`, `1 -> |1_L>`.
    #[default]
    Computational,
    /// `0 -> |+_L>`, `1 -> |-_L>`.
    Dual,
}

impl LogicalBasis {
    pub fn as_str(self) -> &'static str {
        match self {
            LogicalBasis::Computational => "01",
            LogicalBasis::Dual => "pm",
        }
    }
}

impl Serialize for LogicalBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

/// Square complex matrix, row-major. Serializes as nested `[re, im]` arrays.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim {
            m.set(k, k, ONE);
        }
        m
    }

    /// Permutation matrix sending column `j` to row `perm(j)`.
    pub fn permutation(dim: usize, perm: impl Fn(usize) -> usize) -> Self {
        let mut m = Self::zeros(dim);
        for j in 0..dim {
            m.set(perm(j), j, ONE);
        }
        m
    }

    pub fn from_columns(columns: &[Vec<Complex64>]) -> Self {
        let dim = columns.len();
        let mut m = Self::zeros(dim);
        for (c, col) in columns.iter().enumerate() {
            debug_assert_eq!(col.len(), dim);
            for (r, &v) in col.iter().enumerate() {
                m.set(r, c, v);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn column(&self, col: usize) -> Vec<Complex64> {
        (0..self.dim).map(|r| self.entry(r, col)).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        self.entries.chunks(self.dim).map(<[_]>::to_vec).collect()
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|&e| e * factor).collect(),
        }
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(self.dim))?;
        for row in self.entries.chunks(self.dim) {
            let pairs: Vec<[f64; 2]> = row.iter().map(|e| [e.re, e.im]).collect();
            rows.serialize_element(&pairs)?;
        }
        rows.end()
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.dim) {
            let cells: Vec<String> = row.iter().map(|&e| format_complex(e)).collect();
            writeln!(f, "[{}]", cells.join(", "))?;
        }
        Ok(())
    }
}

/// Short rendering with exact-looking values snapped: `1`, `-i`, `0.7071+0.7071i`.
pub fn format_complex(z: Complex64) -> String {
    let snap = |x: f64| if x.abs() < 1e-12 { 0.0 } else { x };
    let (re, im) = (snap(z.re), snap(z.im));
    match (re == 0.0, im == 0.0) {
        (true, true) => "0".into(),
        (false, true) => format!("{}", round(re)),
        (true, false) => {
            let v = round(im);
            if v == 1.0 {
                "i".into()
            } else if v == -1.0 {
                "-i".into()
            } else {
                format!("{v}i")
            }
        }
        (false, false) => format!("{}{:+}i", round(re), round(im)),
    }
}

fn round(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// `CNOT` on two labels, first block = control: index `c * 2 + t`.
pub fn cnot_matrix() -> ComplexMatrix {
    ComplexMatrix::permutation(4, |j| if j & 0b10 != 0 { j ^ 1 } else { j })
}

/// Toffoli on three labels, `CI * 4 + CII * 2 + T`.
pub fn toffoli_matrix() -> ComplexMatrix {
    ComplexMatrix::permutation(8, |j| if j & 0b110 == 0b110 { j ^ 1 } else { j })
}

fn check_layout(code: &CodeSpec, layout: &BlockLayout) -> Result<()> {
    if let Some(b) = layout.blocks().iter().find(|b| b.qubits.len() != code.block_size) {
        return Err(Error::Layout(format!(
            "block {} has {} qubits, code {} needs {}",
            b.name,
            b.qubits.len(),
            code.name,
            code.block_size
        )));
    }
    Ok(())
}

/// Unnormalized Walsh-Hadamard on label amplitudes, scaled to stay unitary.
fn hadamard_labels(coeffs: &[Complex64]) -> Vec<Complex64> {
    let dim = coeffs.len();
    let scale = 1.0 / (dim as f64).sqrt();
    (0..dim)
        .map(|k| {
            coeffs
                .iter()
                .enumerate()
                .map(|(j, &c)| if (k & j).count_ones() % 2 == 0 { c } else { -c })
                .sum::<Complex64>()
                * scale
        })
        .collect()
}

/// All `(physical index, amplitude)` terms of the product codeword for label
/// `label` (block 0 is the most significant label bit).
fn product_terms(code: &CodeSpec, layout: &BlockLayout, label: usize) -> Vec<(usize, f64)> {
    let m = layout.num_blocks();
    layout
        .blocks()
        .iter()
        .enumerate()
        .fold(vec![(0usize, 1.0f64)], |acc, (b, block)| {
            let bit = label >> (m - 1 - b) & 1 == 1;
            let terms = code.codeword_terms(bit, &block.qubits);
            acc.iter()
                .flat_map(|&(i, a)| terms.iter().map(move |&(j, t)| (i | j, a * t)))
                .collect()
        })
}

/// Encodes `sum_j coeffs[j] |j>` (labels in `basis`) into the layout's blocks,
/// ancillas in `|0>`.
pub fn encode_register(
    code: &CodeSpec,
    layout: &BlockLayout,
    basis: LogicalBasis,
    coeffs: &[Complex64],
) -> Result<StateVector> {
    check_layout(code, layout)?;
    let dim = 1usize << layout.num_blocks();
    if coeffs.len() != dim {
        return Err(Error::DimensionMismatch {
            left: coeffs.len(),
            right: dim,
        });
    }
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > AMPLITUDE_TOLERANCE {
        return Err(Error::NotNormalized(norm));
    }
    let coeffs = match basis {
        LogicalBasis::Computational => coeffs.to_vec(),
        LogicalBasis::Dual => hadamard_labels(coeffs),
    };
    let mut amps = vec![ZERO; 1usize << layout.total_qubits()];
    for (label, &c) in coeffs.iter().enumerate() {
        if c == ZERO {
            continue;
        }
        for (i, a) in product_terms(code, layout, label) {
            amps[i] += c * a;
        }
    }
    StateVector::from_amplitudes(layout.total_qubits(), amps)
}

/// Encodes the label basis state `label`.
pub fn encode_label(code: &CodeSpec, layout: &BlockLayout, basis: LogicalBasis, label: usize) -> Result<StateVector> {
    let mut coeffs = vec![ZERO; 1usize << layout.num_blocks()];
    if label >= coeffs.len() {
        return Err(Error::DimensionMismatch {
            left: label,
            right: coeffs.len(),
        });
    }
    coeffs[label] = ONE;
    encode_register(code, layout, basis, &coeffs)
}

/// Haar-distributed normalized amplitudes over `dim` labels.
pub fn random_coefficients<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let raw: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = raw.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    raw.into_iter().map(|c| c / norm).collect()
}

/// Label amplitudes of `state` (ancillas projected on `|0>`) and the weight
/// left outside that subspace.
pub fn decode_register(
    code: &CodeSpec,
    layout: &BlockLayout,
    basis: LogicalBasis,
    state: &StateVector,
) -> Result<(Vec<Complex64>, f64)> {
    check_layout(code, layout)?;
    if state.num_qubits() != layout.total_qubits() {
        return Err(Error::DimensionMismatch {
            left: state.num_qubits(),
            right: layout.total_qubits(),
        });
    }
    let amps = state.amplitudes();
    let coeffs: Vec<Complex64> = (0..1usize << layout.num_blocks())
        .map(|label| {
            product_terms(code, layout, label)
                .into_iter()
                .map(|(i, a)| amps[i] * a)
                .sum()
        })
        .collect();
    let inside: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let leakage = (state.norm_sqr() - inside).max(0.0);
    let coeffs = match basis {
        LogicalBasis::Computational => coeffs,
        LogicalBasis::Dual => hadamard_labels(&coeffs),
    };
    Ok((coeffs, leakage))
}

/// Logical matrix of a circuit and the leakage of every column.
#[derive(Debug, Clone, PartialEq)]
pub struct LogicalAction {
    pub matrix: ComplexMatrix,
    pub leakage: Vec<f64>,
}

impl LogicalAction {
    pub fn max_leakage(&self) -> f64 {
        self.leakage.iter().copied().fold(0.0, f64::max)
    }
}

/// Runs the circuit on every encoded label state and decodes the outputs.
/// Leakage is reported, not rejected.
pub fn measure_logical_action(circuit: &Circuit, code: &CodeSpec, basis: LogicalBasis) -> Result<LogicalAction> {
    let dim = 1usize << circuit.layout.num_blocks();
    let column = |label: usize| -> Result<(Vec<Complex64>, f64)> {
        let mut state = encode_label(code, &circuit.layout, basis, label)?;
        circuit.run(&mut state)?;
        decode_register(code, &circuit.layout, basis, &state)
    };
    // Wide registers parallelize inside the kernels; running their columns
    // concurrently would only multiply memory.
    let columns: Vec<(Vec<Complex64>, f64)> = if circuit.layout.total_qubits() >= 16 {
        (0..dim).map(column).collect::<Result<_>>()?
    } else {
        (0..dim).into_par_iter().map(column).collect::<Result<_>>()?
    };
    let (cols, leakage): (Vec<_>, Vec<_>) = columns.into_iter().unzip();
    Ok(LogicalAction {
        matrix: ComplexMatrix::from_columns(&cols),
        leakage,
    })
}

/// [`measure_logical_action`], failing if any column leaks more than
/// [`LEAKAGE_TOLERANCE`].
pub fn logical_action_matrix(circuit: &Circuit, code: &CodeSpec, basis: LogicalBasis) -> Result<LogicalAction> {
    let action = measure_logical_action(circuit, code, basis)?;
    if let Some((column, &leakage)) = action
        .leakage
        .iter()
        .enumerate()
        .find(|(_, &l)| l > LEAKAGE_TOLERANCE)
    {
        return Err(Error::Leakage { column, leakage });
    }
    Ok(action)
}

/// Result of comparing a matrix with a reference up to one global phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseComparison {
    pub global_phase: Complex64,
    pub max_deviation: f64,
}

impl PhaseComparison {
    pub fn matches(&self, tolerance: f64) -> bool {
        self.max_deviation <= tolerance
    }
}

/// Phase of the largest reference entry fixes the global phase; the deviation
/// is the largest entry of `|actual - phase * ideal|`.
pub fn compare_up_to_phase(actual: &ComplexMatrix, ideal: &ComplexMatrix) -> PhaseComparison {
    if actual.dim() != ideal.dim() {
        return PhaseComparison {
            global_phase: ONE,
            max_deviation: f64::INFINITY,
        };
    }
    // First of the largest entries, so the top-left block fixes the phase.
    let pivot = (0..ideal.entries.len())
        .rev()
        .max_by(|&a, &b| ideal.entries[a].norm().total_cmp(&ideal.entries[b].norm()))
        .unwrap_or(0);
    let ratio = actual.entries[pivot] / ideal.entries[pivot];
    let global_phase = if ratio.norm() > 1e-12 { ratio / ratio.norm() } else { ONE };
    PhaseComparison {
        global_phase,
        max_deviation: actual.max_abs_diff(&ideal.scaled(global_phase)),
    }
}

/// Phase of each control block of `actual` relative to `ideal`, normalized to
/// the all-zero control block. Block `c` covers the rows and columns whose
/// label, shifted right by `target_bits`, equals `c`.
pub fn control_block_phases(actual: &ComplexMatrix, ideal: &ComplexMatrix, target_bits: usize) -> Vec<Complex64> {
    let blocks = actual.dim() >> target_bits;
    let size = 1usize << target_bits;
    let raw: Vec<Complex64> = (0..blocks)
        .map(|c| {
            let cells = (0..size).flat_map(|r| (0..size).map(move |k| (c * size + r, c * size + k)));
            let (r, k) = cells
                .max_by(|&(r1, k1), &(r2, k2)| ideal.entry(r1, k1).norm().total_cmp(&ideal.entry(r2, k2).norm()))
                .unwrap_or((0, 0));
            let ratio = actual.entry(r, k) / ideal.entry(r, k);
            if ratio.norm() > 1e-12 {
                ratio / ratio.norm()
            } else {
                ONE
            }
        })
        .collect();
    let base = raw.first().copied().unwrap_or(ONE);
    raw.iter().map(|&p| p / base).collect()
}

/// `1`, `-1`, `i`, `-i` when the phase is one of those, otherwise `e^{i<angle>}`.
pub fn phase_label(phase: Complex64) -> String {
    for (value, label) in [(ONE, "1"), (-ONE, "-1"), (Complex64::i(), "i"), (-Complex64::i(), "-i")] {
        if (phase - value).norm() < 1e-9 {
            return label.to_string();
        }
    }
    format!("e^{{i{:.6}}}", phase.arg())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{encode, CodeSpec};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn single_block_matches_encode() {
        let code = CodeSpec::seven_bit();
        let layout = BlockLayout::stacked(&["A"], 7, 0);
        let (a, b) = (c(0.6, 0.0), c(0.0, 0.8));
        let direct = encode(&code, a, b).unwrap();
        let via = encode_register(&code, &layout, LogicalBasis::Computational, &[a, b]).unwrap();
        assert!(direct.max_abs_diff(&via) < 1e-15);
    }

    #[test]
    fn dual_labels_are_plus_minus() {
        let code = CodeSpec::three_bit();
        let layout = BlockLayout::stacked(&["A"], 3, 0);
        let minus = encode_label(&code, &layout, LogicalBasis::Dual, 1).unwrap();
        let expected = encode(&code, c(0.5f64.sqrt(), 0.0), c(-(0.5f64.sqrt()), 0.0)).unwrap();
        assert!(minus.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn decode_inverts_encode_with_ancilla() {
        let code = CodeSpec::three_bit();
        let layout = BlockLayout::stacked(&["A", "B"], 3, 1);
        let coeffs = [c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)];
        for basis in [LogicalBasis::Computational, LogicalBasis::Dual] {
            let state = encode_register(&code, &layout, basis, &coeffs).unwrap();
            let (back, leakage) = decode_register(&code, &layout, basis, &state).unwrap();
            assert!(leakage < 1e-15);
            for (x, y) in back.iter().zip(&coeffs) {
                assert!((x - y).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn leaked_weight_is_reported() {
        let code = CodeSpec::three_bit();
        let layout = BlockLayout::stacked(&["A"], 3, 0);
        // |001> is in |1_L>'s support but carries only a quarter of its weight.
        let state = StateVector::basis_state(3, "001").unwrap();
        let (coeffs, leakage) = decode_register(&code, &layout, LogicalBasis::Computational, &state).unwrap();
        assert!((coeffs[1].norm_sqr() - 0.25).abs() < 1e-15);
        assert!((leakage - 0.75).abs() < 1e-15);
    }

    #[test]
    fn empty_circuit_acts_as_identity() {
        let code = CodeSpec::three_bit();
        let circuit = Circuit::new("empty", BlockLayout::stacked(&["C", "T"], 3, 0));
        let action = logical_action_matrix(&circuit, &code, LogicalBasis::Computational).unwrap();
        assert!(action.matrix.max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
    }

    #[test]
    fn reference_matrices() {
        let cnot = cnot_matrix();
        assert_eq!(cnot.entry(3, 2), ONE);
        assert_eq!(cnot.entry(2, 3), ONE);
        assert_eq!(cnot.entry(1, 1), ONE);
        let toffoli = toffoli_matrix();
        assert_eq!(toffoli.entry(7, 6), ONE);
        assert_eq!(toffoli.entry(5, 5), ONE);
    }

    #[test]
    fn phase_comparison_and_block_phases() {
        let ideal = toffoli_matrix();
        let mut actual = ideal.scaled(c(0.0, -1.0));
        assert!(compare_up_to_phase(&actual, &ideal).matches(1e-15));
        for r in 6..8 {
            for k in 6..8 {
                let v = actual.entry(r, k) * Complex64::i();
                actual.set(r, k, v);
            }
        }
        assert!(!compare_up_to_phase(&actual, &ideal).matches(1e-3));
        let phases = control_block_phases(&actual, &ideal, 1);
        let labels: Vec<String> = phases.iter().map(|&p| phase_label(p)).collect();
        assert_eq!(labels, ["1", "1", "1", "i"]);
    }

    #[test]
    fn matrix_serializes_as_pairs() {
        let m = ComplexMatrix::identity(2).scaled(c(0.0, 1.0));
        assert_eq!(serde_json::to_string(&m).unwrap(), "[[[0.0,1.0],[0.0,0.0]],[[0.0,0.0],[0.0,1.0]]]");
        assert_eq!(format_complex(c(0.0, -1.0)), "-i");
        assert_eq!(format_complex(c(0.5, -0.25)), "0.5-0.25i");
    }
}
