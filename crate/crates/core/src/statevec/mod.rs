//! Dense state-vector engine.
//!
//! Qubit `k` is bit `k` of the amplitude index (qubit 0 is the least
//! significant). Bitstrings are written like kets, most significant qubit
//! first, so `basis_state(3, "100")` sets amplitude 4.

mod gate;
mod kernel;

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliString, PhysicalPauli};

pub use gate::{GateMatrix, UNITARITY_TOLERANCE};
use kernel::{Selector, SingleOp};

pub const MAX_QUBITS: usize = 24;
/// Largest tolerated `| ||psi|| - 1 |`.
pub const NORM_TOLERANCE: f64 = 1e-9;
/// Amplitudes below this magnitude are left out of [`StateVector::dump`].
pub const DUMP_CUTOFF: f64 = 1e-14;
/// Outcome probabilities within this distance of 0 or 1 are treated as certain.
const CERTAINTY_TOLERANCE: f64 = 1e-10;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

/// Result of a projective Pauli measurement.
#[derive(Clone, Debug)]
pub struct Measurement {
    pub eigenvalue: i8,
    pub probability: f64,
    /// No randomness was consumed: the input was an eigenstate.
    pub deterministic: bool,
    pub state: StateVector,
}

fn check_qubit_count(num_qubits: usize) -> Result<()> {
    if (1..=MAX_QUBITS).contains(&num_qubits) {
        Ok(())
    } else {
        Err(Error::QubitCount(num_qubits))
    }
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::from_index(num_qubits, 0)
    }

    pub fn from_index(num_qubits: usize, index: usize) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let mut amps = vec![ZERO; 1 << num_qubits];
        *amps.get_mut(index).ok_or(Error::QubitOutOfRange {
            qubit: index,
            num_qubits,
        })? = ONE;
        Ok(Self { num_qubits, amps })
    }

    /// Computational basis state from a ket-ordered bitstring.
    pub fn basis_state(num_qubits: usize, bits: &str) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        let index = parse_bitstring(bits, num_qubits)?;
        Self::from_index(num_qubits, index)
    }

    /// Wraps raw amplitudes; they must already be normalized.
    pub fn from_amplitudes(num_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_qubit_count(num_qubits)?;
        if amps.len() != 1 << num_qubits {
            return Err(Error::DimensionMismatch {
                left: num_qubits,
                right: amps.len().trailing_zeros() as usize,
            });
        }
        let state = Self { num_qubits, amps };
        state.check_norm()?;
        Ok(state)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn check_norm(&self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if (norm - 1.0).abs() <= NORM_TOLERANCE {
            Ok(())
        } else {
            Err(Error::NormDrift {
                norm,
                tolerance: NORM_TOLERANCE,
            })
        }
    }

    fn check_qubits(&self, qubits: &[usize]) -> Result<usize> {
        let mut mask = 0usize;
        for &q in qubits {
            if q >= self.num_qubits {
                return Err(Error::QubitOutOfRange {
                    qubit: q,
                    num_qubits: self.num_qubits,
                });
            }
            if mask & (1 << q) != 0 {
                return Err(Error::DuplicateQubit(q));
            }
            mask |= 1 << q;
        }
        Ok(mask)
    }

    /// Checks that control-type qubits are valid and disjoint from the targets.
    fn selector(&self, controls: &[usize], parity: &[usize], targets: &[usize]) -> Result<Selector> {
        let target_mask = self.check_qubits(targets)?;
        let ctrl_mask = self.check_qubits(controls)?;
        let parity_mask = self.check_qubits(parity)?;
        if let Some(&q) = controls.iter().chain(parity).find(|&&q| target_mask & (1 << q) != 0) {
            return Err(Error::ControlTargetOverlap(q));
        }
        if let Some(&q) = controls.iter().find(|&&q| parity_mask & (1 << q) != 0) {
            return Err(Error::DuplicateQubit(q));
        }
        Ok(Selector {
            ctrl_mask,
            parity_mask,
        })
    }

    fn apply_selected(&mut self, gate: &GateMatrix, targets: &[usize], sel: Selector) -> Result<()> {
        if gate.arity() != targets.len() {
            return Err(Error::ArityMismatch {
                arity: gate.arity(),
                targets: targets.len(),
            });
        }
        if targets.len() == 1 {
            let op = if gate.is_exact_x() {
                SingleOp::Swap
            } else {
                SingleOp::Matrix(gate.as_2x2())
            };
            kernel::apply_single(&mut self.amps, targets[0], op, sel);
        } else {
            kernel::apply_multi(&mut self.amps, gate.entries(), targets, sel);
        }
        Ok(())
    }

    /// Applies `gate` to `targets` (identity elsewhere).
    pub fn apply_unitary(&mut self, gate: &GateMatrix, targets: &[usize]) -> Result<()> {
        let sel = self.selector(&[], &[], targets)?;
        self.apply_selected(gate, targets, sel)
    }

    /// Applies `gate` to `targets` on the subspace where every control is `|1>`.
    pub fn apply_controlled(&mut self, gate: &GateMatrix, controls: &[usize], targets: &[usize]) -> Result<()> {
        let sel = self.selector(controls, &[], targets)?;
        self.apply_selected(gate, targets, sel)
    }

    /// Applies `gate` to `targets` on the subspace where the `parity` qubits
    /// hold an odd number of ones.
    pub fn apply_parity_controlled(&mut self, gate: &GateMatrix, parity: &[usize], targets: &[usize]) -> Result<()> {
        if parity.is_empty() {
            return Err(Error::Internal("parity control needs at least one qubit".into()));
        }
        let sel = self.selector(&[], parity, targets)?;
        self.apply_selected(gate, targets, sel)
    }

    pub fn apply_pauli(&mut self, op: &PhysicalPauli) -> Result<()> {
        let support = op.support_mask();
        if support >> self.num_qubits != 0 {
            return Err(Error::QubitOutOfRange {
                qubit: usize::BITS as usize - 1 - support.leading_zeros() as usize,
                num_qubits: self.num_qubits,
            });
        }
        if op.z_mask != 0 {
            let z = op.z_mask;
            kernel::apply_sign(&mut self.amps, move |i| (i & z).count_ones() & 1 == 1);
        }
        let mut x = op.x_mask;
        while x != 0 {
            let q = x.trailing_zeros() as usize;
            kernel::apply_single(&mut self.amps, q, SingleOp::Swap, Selector::default());
            x &= x - 1;
        }
        if op.num_y % 4 != 0 {
            let phase = op.y_phase();
            self.amps.iter_mut().for_each(|a| *a *= phase);
        }
        Ok(())
    }

    /// Multiplies by `-1` every basis state whose index satisfies `flip`.
    pub fn apply_sign_by<F>(&mut self, flip: F)
    where
        F: Fn(usize) -> bool + Sync,
    {
        kernel::apply_sign(&mut self.amps, flip);
    }

    /// `P|psi>` as a new vector.
    fn pauli_image(&self, op: &PhysicalPauli) -> Vec<Complex64> {
        let phase = op.y_phase();
        let mut out = vec![ZERO; self.dim()];
        for (i, &a) in self.amps.iter().enumerate() {
            let sign = if (i & op.z_mask).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
            out[i ^ op.x_mask] = a * phase * sign;
        }
        out
    }

    /// `<psi|P|psi>`; real for Hermitian `P`.
    pub fn expectation(&self, op: &PhysicalPauli) -> f64 {
        let phase = op.y_phase();
        let sum: Complex64 = self
            .amps
            .iter()
            .enumerate()
            .map(|(i, &a)| {
                let sign = if (i & op.z_mask).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
                self.amps[i ^ op.x_mask].conj() * a * phase * sign
            })
            .sum();
        sum.re
    }

    /// `<self|other>`.
    pub fn inner_product(&self, other: &StateVector) -> Result<Complex64> {
        if self.num_qubits != other.num_qubits {
            return Err(Error::DimensionMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner_product(other)?.norm_sqr())
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        if self.num_qubits != other.num_qubits {
            return f64::INFINITY;
        }
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Copy with the global phase fixed so the first nonzero amplitude is real
    /// and positive.
    pub fn phase_aligned(&self) -> StateVector {
        let mut out = self.clone();
        if let Some(first) = self.amps.iter().find(|a| a.norm() > DUMP_CUTOFF) {
            let rot = first.conj() / first.norm();
            out.amps.iter_mut().for_each(|a| *a *= rot);
        }
        out
    }

    /// Projective measurement of a register-wide Pauli string (leftmost letter
    /// on the most significant qubit).
    pub fn measure_pauli(&self, observable: &PauliString, seed: u64) -> Result<Measurement> {
        if observable.len() != self.num_qubits {
            return Err(Error::MalformedPauli(format!(
                "{observable} on a {}-qubit state",
                self.num_qubits
            )));
        }
        self.measure_observable(&observable.on_register(), &observable.to_string(), seed)
    }

    /// Projective measurement of a Pauli given in bit-mask form.
    ///
    /// Eigenstates are reported without consuming randomness and are returned
    /// unchanged; otherwise the outcome is drawn from a generator seeded with
    /// `seed` and the state is projected and renormalized.
    pub fn measure_observable(&self, op: &PhysicalPauli, label: &str, seed: u64) -> Result<Measurement> {
        self.apply_pauli_check(op)?;
        let p_plus = ((1.0 + self.expectation(op)) / 2.0).clamp(0.0, 1.0);
        if p_plus >= 1.0 - CERTAINTY_TOLERANCE || p_plus <= CERTAINTY_TOLERANCE {
            let eigenvalue = if p_plus > 0.5 { 1 } else { -1 };
            return Ok(Measurement {
                eigenvalue,
                probability: if eigenvalue == 1 { p_plus } else { 1.0 - p_plus },
                deterministic: true,
                state: self.clone(),
            });
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw: f64 = rng.random();
        let eigenvalue = if draw < p_plus { 1 } else { -1 };
        let (probability, state) = self.project(op, label, eigenvalue)?;
        Ok(Measurement {
            eigenvalue,
            probability,
            deterministic: false,
            state,
        })
    }

    /// Projects onto the `outcome` eigenspace of `op` and renormalizes.
    pub fn project(&self, op: &PhysicalPauli, label: &str, outcome: i8) -> Result<(f64, StateVector)> {
        self.apply_pauli_check(op)?;
        let sign = if outcome >= 0 { 1.0 } else { -1.0 };
        let p = ((1.0 + sign * self.expectation(op)) / 2.0).clamp(0.0, 1.0);
        if p <= CERTAINTY_TOLERANCE {
            return Err(Error::ZeroProbabilityBranch {
                observable: label.to_string(),
                outcome: if outcome >= 0 { 1 } else { -1 },
            });
        }
        let image = self.pauli_image(op);
        let scale = 0.5 / p.sqrt();
        let amps = self
            .amps
            .iter()
            .zip(&image)
            .map(|(a, pa)| (a + pa * sign) * scale)
            .collect();
        Ok((
            p,
            StateVector {
                num_qubits: self.num_qubits,
                amps,
            },
        ))
    }

    fn apply_pauli_check(&self, op: &PhysicalPauli) -> Result<()> {
        if op.support_mask() >> self.num_qubits != 0 {
            return Err(Error::MalformedPauli(format!(
                "observable reaches beyond {} qubits",
                self.num_qubits
            )));
        }
        Ok(())
    }

    /// Reduced density matrix of `qubits` (first listed = most significant).
    pub fn reduced_density_matrix(&self, qubits: &[usize]) -> Result<DensityMatrix> {
        let mask = self.check_qubits(qubits)?;
        let k = qubits.len();
        let dim = 1usize << k;
        let deposit = |sub: usize| -> usize {
            qubits
                .iter()
                .enumerate()
                .filter(|(b, _)| sub >> (k - 1 - b) & 1 == 1)
                .map(|(_, &q)| 1usize << q)
                .sum()
        };
        let offsets: Vec<usize> = (0..dim).map(deposit).collect();
        let mut entries = vec![ZERO; dim * dim];
        for rest in (0..self.dim()).filter(|i| i & mask == 0) {
            for (a, &oa) in offsets.iter().enumerate() {
                let amp_a = self.amps[rest | oa];
                if amp_a == ZERO {
                    continue;
                }
                for (b, &ob) in offsets.iter().enumerate() {
                    entries[a * dim + b] += amp_a * self.amps[rest | ob].conj();
                }
            }
        }
        Ok(DensityMatrix { dim, entries })
    }

    /// One line per amplitude above [`DUMP_CUTOFF`]: `index(bitstring) re im`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm() < DUMP_CUTOFF {
                continue;
            }
            let _ = writeln!(
                out,
                "{i}({bits}) {re:.12} {im:.12}",
                bits = format_bitstring(i, self.num_qubits),
                re = a.re,
                im = a.im
            );
        }
        out
    }
}

/// Small dense density matrix, row-major.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|k| self.entry(k, k).re).sum()
    }

    /// `tr(rho^2)`.
    pub fn purity(&self) -> f64 {
        // rho is Hermitian, so tr(rho^2) = sum |rho_ab|^2.
        self.entries.iter().map(|e| e.norm_sqr()).sum()
    }

    /// `<phi|rho|phi>` for a pure reference state of matching dimension.
    pub fn overlap_with_pure(&self, phi: &[Complex64]) -> f64 {
        debug_assert_eq!(phi.len(), self.dim);
        let mut acc = ZERO;
        for a in 0..self.dim {
            for b in 0..self.dim {
                acc += phi[a].conj() * self.entry(a, b) * phi[b];
            }
        }
        acc.re
    }
}

/// Parses a ket-ordered bitstring (most significant qubit first); `_` and
/// spaces are ignored.
pub fn parse_bitstring(bits: &str, num_qubits: usize) -> Result<usize> {
    let digits: Vec<char> = bits.chars().filter(|c| *c != '_' && *c != ' ').collect();
    if digits.len() != num_qubits || digits.iter().any(|c| *c != '0' && *c != '1') {
        return Err(Error::Bitstring {
            bits: bits.to_string(),
            expected: num_qubits,
        });
    }
    Ok(digits.iter().fold(0usize, |acc, &c| (acc << 1) | usize::from(c == '1')))
}

pub fn format_bitstring(index: usize, num_qubits: usize) -> String {
    (0..num_qubits)
        .rev()
        .map(|q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}
