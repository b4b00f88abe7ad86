//! Single-fault injection, oracle-built recovery tables and fault sweeps.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::circuit::{BlockLayout, Circuit};
use crate::codes::{definite_block_syndrome, extract_block_syndrome, CodeSpec, Syndrome};
use crate::error::{Error, Result};
use crate::logical::{encode_register, random_coefficients, LogicalBasis};
use crate::pauli::{Pauli, PauliString, PhysicalPauli};
use crate::statevec::StateVector;

/// Fidelity at or above which a run counts as recovered.
pub const RECOVERY_TOLERANCE: f64 = 1e-10;
/// Payloads used to build a table when the caller does not say otherwise.
pub const DEFAULT_TABLE_PAYLOADS: usize = 4;
pub const DEFAULT_TABLE_SEED: u64 = 0x7ab1e;

/// A Pauli on one physical qubit at a timeline slot: slot `k` sits after the
/// first `k` ops.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct PauliError {
    pub qubit: usize,
    pub kind: Pauli,
    pub position: usize,
}

impl PauliError {
    pub fn new(qubit: usize, kind: Pauli, position: usize) -> Self {
        Self { qubit, kind, position }
    }

    pub fn physical(&self) -> PhysicalPauli {
        PhysicalPauli::single(self.qubit, self.kind)
    }

    pub fn inject(&self, state: &mut StateVector) -> Result<()> {
        if self.qubit >= state.num_qubits() {
            return Err(Error::QubitOutOfRange {
                qubit: self.qubit,
                num_qubits: state.num_qubits(),
            });
        }
        state.apply_pauli(&self.physical())
    }

    pub fn describe(&self, layout: &BlockLayout) -> String {
        format!("{} on {} @{}", self.kind, layout.qubit_label(self.qubit), self.position)
    }
}

impl fmt::Display for PauliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}@{}", self.kind, self.qubit, self.position)
    }
}

/// Applies `error` to a copy of `state`.
pub fn inject(state: &StateVector, error: &PauliError) -> Result<StateVector> {
    let mut out = state.clone();
    error.inject(&mut out)?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Positions {
    #[default]
    All,
    /// Only before the first op.
    Before,
    /// Only after the last op.
    After,
    Only(Vec<usize>),
}

impl Positions {
    fn list(&self, len: usize) -> Vec<usize> {
        match self {
            Positions::All => (0..=len).collect(),
            Positions::Before => vec![0],
            Positions::After => vec![len],
            Positions::Only(list) => list.iter().copied().filter(|&p| p <= len).collect(),
        }
    }
}

/// Restricts fault enumeration to some blocks and timeline slots.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FaultScope {
    /// Block names; `None` means every qubit including ancillas.
    pub blocks: Option<Vec<String>>,
    pub positions: Positions,
}

impl FaultScope {
    pub fn blocks(names: &[&str]) -> Self {
        Self {
            blocks: Some(names.iter().map(|s| s.to_string()).collect()),
            positions: Positions::All,
        }
    }

    pub fn at(mut self, positions: Positions) -> Self {
        self.positions = positions;
        self
    }
}

/// Every `(position, qubit, kind)` fault, ordered by position, then qubit in
/// layout order (blocks, then ancillas), then kind.
pub fn enumerate_fault_points(circuit: &Circuit, kinds: &[Pauli]) -> Vec<PauliError> {
    enumerate_faults(circuit, kinds, &FaultScope::default())
}

pub fn enumerate_faults(circuit: &Circuit, kinds: &[Pauli], scope: &FaultScope) -> Vec<PauliError> {
    let layout = &circuit.layout;
    let qubits: Vec<usize> = match &scope.blocks {
        None => layout.all_qubits(),
        Some(names) => layout
            .blocks()
            .iter()
            .filter(|b| names.contains(&b.name))
            .flat_map(|b| b.qubits.iter().copied())
            .collect(),
    };
    let mut kinds = kinds.to_vec();
    kinds.sort();
    kinds.dedup();
    kinds.retain(|&k| k != Pauli::I);
    scope
        .positions
        .list(circuit.len())
        .into_iter()
        .flat_map(|p| {
            let kinds = &kinds;
            qubits
                .iter()
                .flat_map(move |&q| kinds.iter().map(move |&k| PauliError::new(q, k, p)))
        })
        .collect()
}

/// Phase part of a correction. On code states the parity of a block equals its
/// logical value, so these act as logical `Z` and logical `CZ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PhaseCorrection {
    None,
    LogicalZ(usize),
    LogicalCz(usize, usize),
}

/// Per-block Pauli strings plus an optional logical phase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Correction {
    pub paulis: Vec<PauliString>,
    pub phase: PhaseCorrection,
}

impl Correction {
    pub fn identity(code: &CodeSpec, layout: &BlockLayout) -> Self {
        Self {
            paulis: vec![PauliString::identity(code.block_size); layout.num_blocks()],
            phase: PhaseCorrection::None,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.phase == PhaseCorrection::None && self.paulis.iter().all(PauliString::is_identity)
    }

    pub fn has_conditional_phase(&self) -> bool {
        self.phase != PhaseCorrection::None
    }

    pub fn apply(&self, layout: &BlockLayout, state: &mut StateVector) -> Result<()> {
        for (block, pauli) in layout.blocks().iter().zip(&self.paulis) {
            if !pauli.is_identity() {
                state.apply_pauli(&pauli.on_qubits(&block.qubits))?;
            }
        }
        let mask = |b: usize| layout.blocks()[b].qubits.iter().map(|&q| 1usize << q).sum::<usize>();
        match self.phase {
            PhaseCorrection::None => {}
            PhaseCorrection::LogicalZ(b) => {
                let m = mask(b);
                state.apply_sign_by(move |i| (i & m).count_ones() & 1 == 1);
            }
            PhaseCorrection::LogicalCz(b1, b2) => {
                let (m1, m2) = (mask(b1), mask(b2));
                state.apply_sign_by(move |i| (i & m1).count_ones() & (i & m2).count_ones() & 1 == 1);
            }
        }
        Ok(())
    }

    /// `identity`, or e.g. `C:ZII T:ZII` and `CZ(C,T)` joined by spaces.
    pub fn describe(&self, layout: &BlockLayout) -> String {
        let mut parts: Vec<String> = layout
            .blocks()
            .iter()
            .zip(&self.paulis)
            .filter(|(_, p)| !p.is_identity())
            .map(|(b, p)| format!("{}:{}", b.name, p))
            .collect();
        let name = |b: usize| layout.blocks()[b].name.as_str();
        match self.phase {
            PhaseCorrection::None => {}
            PhaseCorrection::LogicalZ(b) => parts.push(format!("Z_L({})", name(b))),
            PhaseCorrection::LogicalCz(a, b) => parts.push(format!("CZ_L({},{})", name(a), name(b))),
        }
        if parts.is_empty() {
            "identity".to_string()
        } else {
            parts.join(" ")
        }
    }
}

/// One syndrome per block.
pub type JointSyndrome = Vec<Syndrome>;

pub fn format_joint(syndromes: &[Syndrome]) -> String {
    syndromes.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("|")
}

/// Measures every block's stabilizers in layout order.
pub fn measure_joint_syndrome(
    code: &CodeSpec,
    layout: &BlockLayout,
    state: &StateVector,
    seed: u64,
) -> Result<(JointSyndrome, StateVector)> {
    let mut current = state.clone();
    let mut syndromes = Vec::with_capacity(layout.num_blocks());
    for (b, block) in layout.blocks().iter().enumerate() {
        let block_seed = seed.wrapping_add((b as u64).wrapping_mul(0xA24B_AED4_963E_E407));
        let (s, next) = extract_block_syndrome(code, &current, &block.qubits, block_seed)?;
        syndromes.push(s);
        current = next;
    }
    Ok((syndromes, current))
}

fn definite_joint_syndrome(code: &CodeSpec, layout: &BlockLayout, state: &StateVector) -> Option<JointSyndrome> {
    layout
        .blocks()
        .iter()
        .map(|b| definite_block_syndrome(code, state, &b.qubits))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableOptions {
    pub payloads: usize,
    pub seed: u64,
}

impl Default for TableOptions {
    fn default() -> Self {
        Self {
            payloads: DEFAULT_TABLE_PAYLOADS,
            seed: DEFAULT_TABLE_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableEntry {
    pub correction: Correction,
    /// Faults that produced this syndrome during construction, in input order.
    pub faults: Vec<PauliError>,
}

/// Joint syndrome to correction, for one circuit and code.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryTable {
    pub circuit: String,
    pub layout: BlockLayout,
    pub code: CodeSpec,
    pub entries: BTreeMap<JointSyndrome, TableEntry>,
}

/// Candidate corrections for one class, cheapest first.
fn candidates(code: &CodeSpec, layout: &BlockLayout, syndromes: &[Syndrome]) -> Vec<Correction> {
    let n = code.block_size;
    let per_block: Vec<Vec<PauliString>> = syndromes
        .iter()
        .map(|s| {
            let mut options = Vec::new();
            if let Some(preferred) = code.syndrome_table.get(s) {
                options.push(preferred.clone());
            }
            for pos in 0..n {
                for kind in Pauli::NONTRIVIAL {
                    let p = PauliString::single(n, pos, kind);
                    if code.pauli_syndrome(&p) == *s && !options.contains(&p) {
                        options.push(p);
                    }
                }
            }
            options
        })
        .collect();

    let m = layout.num_blocks();
    let mut phases = vec![(0usize, PhaseCorrection::None)];
    phases.extend((0..m).map(|b| (1, PhaseCorrection::LogicalZ(b))));
    for a in 0..m {
        for b in a + 1..m {
            phases.push((2, PhaseCorrection::LogicalCz(a, b)));
        }
    }

    let mut paulis: Vec<(usize, Vec<PauliString>)> = vec![(0, Vec::new())];
    for options in &per_block {
        paulis = paulis
            .iter()
            .flat_map(|(cost, prefix)| {
                options.iter().enumerate().map(move |(rank, p)| {
                    let mut next = prefix.clone();
                    next.push(p.clone());
                    (cost + rank, next)
                })
            })
            .collect();
    }
    let mut all: Vec<(usize, Correction)> = phases
        .iter()
        .flat_map(|&(phase_cost, phase)| {
            paulis.iter().map(move |(cost, ps)| {
                (
                    cost + phase_cost,
                    Correction {
                        paulis: ps.clone(),
                        phase,
                    },
                )
            })
        })
        .collect();
    all.sort_by_key(|(cost, _)| *cost);
    all.into_iter().map(|(_, c)| c).collect()
}

/// One fault's erroneous outputs, one per payload.
struct FaultRun {
    fault: PauliError,
    outputs: Vec<StateVector>,
}

fn restores(correction: &Correction, layout: &BlockLayout, run: &FaultRun, references: &[StateVector]) -> Result<bool> {
    for (output, reference) in run.outputs.iter().zip(references) {
        let mut fixed = output.clone();
        correction.apply(layout, &mut fixed)?;
        if fixed.fidelity(reference)? < 1.0 - RECOVERY_TOLERANCE {
            return Ok(false);
        }
    }
    Ok(true)
}

impl RecoveryTable {
    pub fn build(circuit: &Circuit, code: &CodeSpec, faults: &[PauliError]) -> Result<Self> {
        Self::build_with(circuit, code, faults, &TableOptions::default())
    }

    /// Simulates every fault on random payloads, groups faults by their
    /// (payload-independent) joint syndrome and finds one correction per group.
    /// The fault-free run always belongs to the trivial group.
    pub fn build_with(circuit: &Circuit, code: &CodeSpec, faults: &[PauliError], options: &TableOptions) -> Result<Self> {
        let layout = &circuit.layout;
        let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
        let dim = 1usize << layout.num_blocks();
        let inputs: Vec<StateVector> = (0..options.payloads.max(1))
            .map(|_| {
                let coeffs = random_coefficients(dim, &mut rng);
                encode_register(code, layout, LogicalBasis::Computational, &coeffs)
            })
            .collect::<Result<_>>()?;
        let references: Vec<StateVector> = inputs
            .iter()
            .map(|input| {
                let mut s = input.clone();
                circuit.run(&mut s)?;
                Ok(s)
            })
            .collect::<Result<_>>()?;

        let simulate = |fault: &PauliError| -> Result<(JointSyndrome, FaultRun)> {
            let mut outputs = Vec::with_capacity(inputs.len());
            let mut syndrome: Option<JointSyndrome> = None;
            for input in &inputs {
                let mut s = input.clone();
                circuit.run_with_faults(&mut s, std::slice::from_ref(fault))?;
                let observed = definite_joint_syndrome(code, layout, &s).ok_or_else(|| {
                    Error::NondeterministicSyndrome {
                        fault: fault.describe(layout),
                    }
                })?;
                if syndrome.as_ref().is_some_and(|prev| *prev != observed) {
                    return Err(Error::NondeterministicSyndrome {
                        fault: fault.describe(layout),
                    });
                }
                syndrome = Some(observed);
                outputs.push(s);
            }
            Ok((syndrome.expect("at least one payload"), FaultRun { fault: *fault, outputs }))
        };
        let runs: Vec<(JointSyndrome, FaultRun)> = faults.par_iter().map(simulate).collect::<Result<_>>()?;

        let trivial: JointSyndrome = vec![Syndrome::trivial(code.num_stabilizers()); layout.num_blocks()];
        let mut classes: BTreeMap<JointSyndrome, Vec<FaultRun>> = BTreeMap::new();
        classes.entry(trivial.clone()).or_default();
        for (syndrome, run) in runs {
            classes.entry(syndrome).or_default().push(run);
        }

        let mut entries = BTreeMap::new();
        for (syndrome, runs) in classes {
            let clean = FaultRun {
                fault: PauliError::new(0, Pauli::I, 0),
                outputs: references.clone(),
            };
            let needs_clean = syndrome == trivial;
            let members: Vec<&FaultRun> = needs_clean.then_some(&clean).into_iter().chain(runs.iter()).collect();
            let options = candidates(code, layout, &syndrome);
            let mut chosen = None;
            for candidate in &options {
                let mut ok = true;
                for run in &members {
                    if !restores(candidate, layout, run, &references)? {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    chosen = Some(candidate.clone());
                    break;
                }
            }
            let Some(correction) = chosen else {
                return Err(diagnose(layout, &syndrome, &members, &options, &references));
            };
            entries.insert(
                syndrome,
                TableEntry {
                    correction,
                    faults: runs.iter().map(|r| r.fault).collect(),
                },
            );
        }
        Ok(Self {
            circuit: circuit.name.clone(),
            layout: layout.clone(),
            code: code.clone(),
            entries,
        })
    }

    pub fn lookup(&self, syndrome: &[Syndrome]) -> Option<&Correction> {
        self.entries.get(syndrome).map(|e| &e.correction)
    }

    /// Entries that need a logical phase on top of the per-block Paulis.
    pub fn conditional_phase_entries(&self) -> impl Iterator<Item = (&JointSyndrome, &TableEntry)> {
        self.entries.iter().filter(|(_, e)| e.correction.has_conditional_phase())
    }
}

/// Names the reason no single correction fits a class: a fault nothing fixes,
/// or the first pair of faults whose working corrections are disjoint.
fn diagnose(
    layout: &BlockLayout,
    syndrome: &[Syndrome],
    members: &[&FaultRun],
    options: &[Correction],
    references: &[StateVector],
) -> Error {
    let label = |run: &FaultRun| {
        if run.fault.kind == Pauli::I {
            "no fault".to_string()
        } else {
            run.fault.describe(layout)
        }
    };
    let working: Vec<Vec<bool>> = members
        .iter()
        .map(|run| {
            options
                .iter()
                .map(|c| restores(c, layout, run, references).unwrap_or(false))
                .collect()
        })
        .collect();
    if let Some(i) = working.iter().position(|w| !w.contains(&true)) {
        return Error::Uncorrectable {
            fault: format!("{} (syndrome {})", label(members[i]), format_joint(syndrome)),
        };
    }
    let mut common = working[0].clone();
    for (j, w) in working.iter().enumerate().skip(1) {
        let next: Vec<bool> = common.iter().zip(w).map(|(a, b)| *a && *b).collect();
        if !next.contains(&true) {
            let i = (0..j)
                .find(|&i| !working[i].iter().zip(w).any(|(a, b)| *a && *b))
                .unwrap_or(0);
            return Error::AmbiguousSyndrome {
                syndrome: format_joint(syndrome),
                first: label(members[i]),
                second: label(members[j]),
            };
        }
        common = next;
    }
    Error::Internal("no correction found although every pair is compatible".into())
}

/// What happened to one faulty run after recovery.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveryOutcome {
    pub faults: Vec<PauliError>,
    /// Per-block syndromes before recovery, e.g. `["+-", "++"]`.
    pub syndromes: JointSyndrome,
    /// Correction applied; `None` when the syndrome is not in the table.
    pub correction: Option<String>,
    pub conditional_phase: bool,
    pub fidelity: f64,
    pub recovered: bool,
}

/// Measures all block syndromes, applies the table's correction and returns
/// the corrected state. An unknown syndrome leaves the state uncorrected.
pub fn recover_joint(
    table: &RecoveryTable,
    state: &StateVector,
    seed: u64,
) -> Result<(StateVector, JointSyndrome, Option<Correction>)> {
    let (syndromes, mut measured) = measure_joint_syndrome(&table.code, &table.layout, state, seed)?;
    let correction = table.lookup(&syndromes).cloned();
    if let Some(c) = &correction {
        c.apply(&table.layout, &mut measured)?;
    }
    Ok((measured, syndromes, correction))
}

/// Runs `circuit` on `input` with `faults`, recovers, and compares with the
/// clean output `reference`.
pub fn run_and_recover(
    circuit: &Circuit,
    table: &RecoveryTable,
    input: &StateVector,
    reference: &StateVector,
    faults: &[PauliError],
    seed: u64,
) -> Result<RecoveryOutcome> {
    let mut state = input.clone();
    circuit.run_with_faults(&mut state, faults)?;
    let (fixed, syndromes, correction) = recover_joint(table, &state, seed)?;
    let fidelity = fixed.fidelity(reference)?;
    Ok(RecoveryOutcome {
        faults: faults.to_vec(),
        syndromes,
        conditional_phase: correction.as_ref().is_some_and(Correction::has_conditional_phase),
        correction: correction.map(|c| c.describe(&table.layout)),
        fidelity,
        recovered: fidelity >= 1.0 - RECOVERY_TOLERANCE,
    })
}

/// Encodes one random payload (from `payload_seed`, labels in `basis`) and its
/// clean output.
pub fn payload_pair(
    circuit: &Circuit,
    code: &CodeSpec,
    basis: LogicalBasis,
    payload_seed: u64,
) -> Result<(StateVector, StateVector)> {
    let mut rng = ChaCha8Rng::seed_from_u64(payload_seed);
    let coeffs = random_coefficients(1usize << circuit.layout.num_blocks(), &mut rng);
    let input = encode_register(code, &circuit.layout, basis, &coeffs)?;
    let mut reference = input.clone();
    circuit.run(&mut reference)?;
    Ok((input, reference))
}

/// One outcome per fault, in the order given, on one payload from
/// `payload_seed`.
pub fn sweep(
    circuit: &Circuit,
    table: &RecoveryTable,
    faults: &[PauliError],
    basis: LogicalBasis,
    payload_seed: u64,
) -> Result<Vec<RecoveryOutcome>> {
    let (input, reference) = payload_pair(circuit, &table.code, basis, payload_seed)?;
    faults
        .par_iter()
        .enumerate()
        .map(|(k, fault)| {
            let seed = payload_seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
            run_and_recover(circuit, table, &input, &reference, std::slice::from_ref(fault), seed)
        })
        .collect()
}
