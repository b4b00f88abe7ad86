//! Block layouts, primitive operation lists and the circuit text format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::recovery::PauliError;
use crate::statevec::{GateMatrix, StateVector};

/// A named group of physical qubits holding one logical qubit. `qubits[p]`
/// carries codeword position `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub name: String,
    pub qubits: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockLayout {
    blocks: Vec<Block>,
    ancillas: Vec<usize>,
    total_qubits: usize,
}

impl BlockLayout {
    pub fn new(blocks: Vec<Block>, ancillas: Vec<usize>, total_qubits: usize) -> Result<Self> {
        let mut seen = vec![false; total_qubits];
        for &q in blocks.iter().flat_map(|b| b.qubits.iter()).chain(&ancillas) {
            match seen.get_mut(q) {
                None => return Err(Error::Layout(format!("qubit {q} outside {total_qubits} qubits"))),
                Some(true) => return Err(Error::Layout(format!("qubit {q} assigned twice"))),
                Some(slot) => *slot = true,
            }
        }
        if let Some(q) = seen.iter().position(|s| !s) {
            return Err(Error::Layout(format!("qubit {q} belongs to no block or ancilla")));
        }
        for (i, b) in blocks.iter().enumerate() {
            if blocks[..i].iter().any(|o| o.name == b.name) {
                return Err(Error::Layout(format!("block name {} repeated", b.name)));
            }
        }
        Ok(Self {
            blocks,
            ancillas,
            total_qubits,
        })
    }

    /// Blocks laid out left to right like a ket (`|CI>|CII>|T>|ancillas>`):
    /// the first block holds the most significant qubits, ancillas the least.
    pub fn stacked(names: &[&str], block_size: usize, num_ancillas: usize) -> Self {
        let total = names.len() * block_size + num_ancillas;
        let mut next = total;
        let mut take = || {
            next -= 1;
            next
        };
        let blocks = names
            .iter()
            .map(|name| Block {
                name: name.to_string(),
                qubits: (0..block_size).map(|_| take()).collect(),
            })
            .collect();
        let ancillas = (0..num_ancillas).map(|_| take()).collect();
        Self {
            blocks,
            ancillas,
            total_qubits: total,
        }
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn ancillas(&self) -> &[usize] {
        &self.ancillas
    }

    pub fn total_qubits(&self) -> usize {
        self.total_qubits
    }

    pub fn block(&self, name: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.name == name)
    }

    pub fn block_index(&self, name: &str) -> Option<usize> {
        self.blocks.iter().position(|b| b.name == name)
    }

    /// Block qubits in block order, then ancillas.
    pub fn all_qubits(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .flat_map(|b| b.qubits.iter().copied())
            .chain(self.ancillas.iter().copied())
            .collect()
    }

    pub fn data_qubits(&self) -> Vec<usize> {
        self.blocks.iter().flat_map(|b| b.qubits.iter().copied()).collect()
    }

    /// `(block index, position)` of a block qubit.
    pub fn locate(&self, qubit: usize) -> Option<(usize, usize)> {
        self.blocks
            .iter()
            .enumerate()
            .find_map(|(bi, b)| b.qubits.iter().position(|&q| q == qubit).map(|p| (bi, p)))
    }

    /// Human-readable name of a physical qubit, e.g. `T.1` (1-based position) or `anc0`.
    pub fn qubit_label(&self, qubit: usize) -> String {
        if let Some((bi, p)) = self.locate(qubit) {
            format!("{}.{}", self.blocks[bi].name, p + 1)
        } else if let Some(a) = self.ancillas.iter().position(|&q| q == qubit) {
            format!("anc{a}")
        } else {
            format!("q{qubit}")
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    Unitary {
        gate: GateMatrix,
        targets: Vec<usize>,
    },
    Controlled {
        gate: GateMatrix,
        controls: Vec<usize>,
        targets: Vec<usize>,
    },
    /// `gate` fires when the `parity` qubits hold an odd number of ones.
    ParityControlled {
        gate: GateMatrix,
        parity: Vec<usize>,
        targets: Vec<usize>,
    },
}

impl Op {
    pub fn cnot(control: usize, target: usize) -> Self {
        Op::Controlled {
            gate: GateMatrix::x(),
            controls: vec![control],
            targets: vec![target],
        }
    }

    pub fn gate(&self) -> &GateMatrix {
        match self {
            Op::Unitary { gate, .. } | Op::Controlled { gate, .. } | Op::ParityControlled { gate, .. } => gate,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self {
            Op::Unitary { targets, .. } => targets.clone(),
            Op::Controlled { controls, targets, .. } => controls.iter().chain(targets).copied().collect(),
            Op::ParityControlled { parity, targets, .. } => parity.iter().chain(targets).copied().collect(),
        }
    }

    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        match self {
            Op::Unitary { gate, targets } => state.apply_unitary(gate, targets),
            Op::Controlled {
                gate,
                controls,
                targets,
            } => state.apply_controlled(gate, controls, targets),
            Op::ParityControlled { gate, parity, targets } => state.apply_parity_controlled(gate, parity, targets),
        }
    }

    fn is_cnot(&self) -> bool {
        matches!(self, Op::Controlled { gate, controls, targets }
            if controls.len() == 1 && targets.len() == 1 && gate.is_exact_x())
    }
}

/// Blocks whose syndrome may be extracted after the first `position` ops.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub position: usize,
    pub blocks: Vec<String>,
}

/// A labelled run of ops, `start..end`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub label: String,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub name: String,
    pub layout: BlockLayout,
    pub ops: Vec<Op>,
    pub checkpoints: Vec<Checkpoint>,
    pub steps: Vec<Step>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, layout: BlockLayout) -> Self {
        Self {
            name: name.into(),
            layout,
            ops: Vec::new(),
            checkpoints: Vec::new(),
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn push(&mut self, op: Op) {
        self.ops.push(op);
    }

    pub fn cnot(&mut self, control: usize, target: usize) {
        self.push(Op::cnot(control, target));
    }

    /// Declares `blocks` correctable at the current position.
    pub fn checkpoint(&mut self, blocks: &[&str]) {
        let position = self.ops.len();
        let names = blocks.iter().map(|b| b.to_string()).collect();
        match self.checkpoints.last_mut() {
            Some(last) if last.position == position => last.blocks = names,
            _ => self.checkpoints.push(Checkpoint {
                position,
                blocks: names,
            }),
        }
    }

    /// Runs `body` and records the ops it pushed as a labelled step.
    pub fn step(&mut self, label: &str, body: impl FnOnce(&mut Circuit)) {
        let start = self.ops.len();
        body(self);
        self.steps.push(Step {
            label: label.to_string(),
            start,
            end: self.ops.len(),
        });
    }

    pub fn step_range(&self, label: &str) -> Option<Range<usize>> {
        self.steps.iter().find(|s| s.label == label).map(|s| s.start..s.end)
    }

    pub fn checkpoint_at(&self, position: usize) -> Option<&Checkpoint> {
        self.checkpoints.iter().find(|c| c.position == position)
    }

    /// Checks qubit references, checkpoint positions and block names.
    pub fn validate(&self) -> Result<()> {
        let n = self.layout.total_qubits();
        for (k, op) in self.ops.iter().enumerate() {
            if let Some(q) = op.qubits().into_iter().find(|&q| q >= n) {
                return Err(Error::Layout(format!("op {k} references qubit {q} outside {n} qubits")));
            }
        }
        for cp in &self.checkpoints {
            if cp.position > self.ops.len() {
                return Err(Error::Layout(format!("checkpoint at {} past the end", cp.position)));
            }
            if let Some(b) = cp.blocks.iter().find(|b| self.layout.block(b).is_none()) {
                return Err(Error::Layout(format!("checkpoint names unknown block {b}")));
            }
        }
        Ok(())
    }

    fn check_width(&self, state: &StateVector) -> Result<()> {
        if state.num_qubits() != self.layout.total_qubits() {
            return Err(Error::DimensionMismatch {
                left: state.num_qubits(),
                right: self.layout.total_qubits(),
            });
        }
        Ok(())
    }

    pub fn run(&self, state: &mut StateVector) -> Result<()> {
        self.run_range(state, 0..self.ops.len())
    }

    pub fn run_range(&self, state: &mut StateVector, range: Range<usize>) -> Result<()> {
        self.check_width(state)?;
        for op in &self.ops[range] {
            op.apply(state)?;
        }
        state.check_norm()
    }

    /// Runs the circuit with each fault applied at its timeline position
    /// (after that many ops).
    pub fn run_with_faults(&self, state: &mut StateVector, faults: &[PauliError]) -> Result<()> {
        self.check_width(state)?;
        for f in faults {
            if f.position > self.ops.len() || f.qubit >= self.layout.total_qubits() {
                return Err(Error::Layout(format!("fault {f} outside the circuit")));
            }
        }
        for position in 0..=self.ops.len() {
            for f in faults.iter().filter(|f| f.position == position) {
                f.inject(state)?;
            }
            if let Some(op) = self.ops.get(position) {
                op.apply(state)?;
            }
        }
        state.check_norm()
    }

    /// Text dump: layout and matrix table header, then one line per op with
    /// `CHECKPOINT` lines interleaved at their positions.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# circuit {} qubits={}", self.name, self.layout.total_qubits());
        for b in self.layout.blocks() {
            let _ = writeln!(out, "BLOCK {} {}", b.name, join_indices(&b.qubits, ""));
        }
        if !self.layout.ancillas().is_empty() {
            let _ = writeln!(out, "ANCILLA {}", join_indices(self.layout.ancillas(), ""));
        }
        let mut table: BTreeMap<&str, &GateMatrix> = BTreeMap::new();
        for op in &self.ops {
            table.entry(op.gate().name()).or_insert(op.gate());
        }
        for (name, gate) in &table {
            let entries: Vec<String> = gate.entries().iter().map(|e| format!("{},{}", e.re, e.im)).collect();
            let _ = writeln!(out, "MATRIX {name} {} {}", gate.arity(), entries.join(" "));
        }
        for position in 0..=self.ops.len() {
            if let Some(cp) = self.checkpoint_at(position).filter(|c| !c.blocks.is_empty()) {
                let _ = writeln!(out, "CHECKPOINT {}", cp.blocks.join(","));
            }
            let Some(op) = self.ops.get(position) else { break };
            let line = match op {
                _ if op.is_cnot() => {
                    let Op::Controlled { controls, targets, .. } = op else { unreachable!() };
                    format!("CNOT c{} t{}", controls[0], targets[0])
                }
                Op::Unitary { gate, targets } => format!("U {} {}", gate.name(), join_indices(targets, "q")),
                Op::Controlled {
                    gate,
                    controls,
                    targets,
                } => format!(
                    "CU {} {} {}",
                    gate.name(),
                    join_indices(controls, "c"),
                    join_indices(targets, "t")
                ),
                Op::ParityControlled { gate, parity, targets } => format!(
                    "PCU {} {} {}",
                    gate.name(),
                    join_indices(parity, "p"),
                    join_indices(targets, "t")
                ),
            };
            let _ = writeln!(out, "{line}");
        }
        out
    }

    /// Parses [`Circuit::dump`] output. Step labels are not part of the format.
    pub fn parse_dump(text: &str) -> Result<Circuit> {
        let bad = |line: &str, why: &str| Error::Layout(format!("circuit dump line {line:?}: {why}"));
        let mut name = String::new();
        let mut total = 0usize;
        let mut blocks = Vec::new();
        let mut ancillas = Vec::new();
        let mut table: BTreeMap<String, GateMatrix> = BTreeMap::new();
        let mut ops = Vec::new();
        let mut checkpoints = Vec::new();

        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let mut words = line.split_whitespace();
            let head = words.next().unwrap_or_default();
            let rest: Vec<&str> = words.collect();
            let gate = |n: &str| table.get(n).cloned().ok_or_else(|| bad(line, "unknown gate name"));
            match head {
                "#" => {
                    if let [tag, n, width] = rest.as_slice() {
                        if *tag == "circuit" {
                            name = n.to_string();
                            total = width
                                .strip_prefix("qubits=")
                                .and_then(|w| w.parse().ok())
                                .ok_or_else(|| bad(line, "bad width"))?;
                        }
                    }
                }
                "BLOCK" => {
                    let (n, qs) = rest.split_first().ok_or_else(|| bad(line, "missing name"))?;
                    let qubits = qs.iter().map(|q| q.parse()).collect::<std::result::Result<_, _>>();
                    blocks.push(Block {
                        name: n.to_string(),
                        qubits: qubits.map_err(|_| bad(line, "bad qubit"))?,
                    });
                }
                "ANCILLA" => {
                    ancillas = rest
                        .iter()
                        .map(|q| q.parse())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad(line, "bad qubit"))?;
                }
                "MATRIX" => {
                    let [n, arity, entries @ ..] = rest.as_slice() else {
                        return Err(bad(line, "too short"));
                    };
                    let arity: usize = arity.parse().map_err(|_| bad(line, "bad arity"))?;
                    let entries = entries
                        .iter()
                        .map(|e| {
                            let (re, im) = e.split_once(',')?;
                            Some(Complex64::new(re.parse().ok()?, im.parse().ok()?))
                        })
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| bad(line, "bad entry"))?;
                    table.insert(n.to_string(), GateMatrix::new(*n, arity, entries)?);
                }
                "CHECKPOINT" => {
                    let names = rest.first().ok_or_else(|| bad(line, "missing blocks"))?;
                    checkpoints.push(Checkpoint {
                        position: ops.len(),
                        blocks: names.split(',').map(str::to_string).collect(),
                    });
                }
                "CNOT" => {
                    let [c, t] = rest.as_slice() else {
                        return Err(bad(line, "expected c<i> t<j>"));
                    };
                    let c = parse_indices(c, "c").ok_or_else(|| bad(line, "bad control"))?;
                    let t = parse_indices(t, "t").ok_or_else(|| bad(line, "bad target"))?;
                    ops.push(Op::Controlled {
                        gate: GateMatrix::x(),
                        controls: c,
                        targets: t,
                    });
                }
                "U" => {
                    let [n, q] = rest.as_slice() else {
                        return Err(bad(line, "expected name q<i>"));
                    };
                    ops.push(Op::Unitary {
                        gate: gate(n)?,
                        targets: parse_indices(q, "q").ok_or_else(|| bad(line, "bad target"))?,
                    });
                }
                "CU" | "PCU" => {
                    let [n, c, t] = rest.as_slice() else {
                        return Err(bad(line, "expected name controls targets"));
                    };
                    let prefix = if head == "CU" { "c" } else { "p" };
                    let controls = parse_indices(c, prefix).ok_or_else(|| bad(line, "bad controls"))?;
                    let targets = parse_indices(t, "t").ok_or_else(|| bad(line, "bad targets"))?;
                    ops.push(if head == "CU" {
                        Op::Controlled {
                            gate: gate(n)?,
                            controls,
                            targets,
                        }
                    } else {
                        Op::ParityControlled {
                            gate: gate(n)?,
                            parity: controls,
                            targets,
                        }
                    });
                }
                _ => return Err(bad(line, "unknown directive")),
            }
        }
        let circuit = Circuit {
            name,
            layout: BlockLayout::new(blocks, ancillas, total)?,
            ops,
            checkpoints,
            steps: Vec::new(),
        };
        circuit.validate()?;
        Ok(circuit)
    }
}

fn join_indices(qubits: &[usize], prefix: &str) -> String {
    let sep = if prefix.is_empty() { " " } else { "," };
    qubits.iter().map(|q| format!("{prefix}{q}")).collect::<Vec<_>>().join(sep)
}

fn parse_indices(field: &str, prefix: &str) -> Option<Vec<usize>> {
    field
        .split(',')
        .map(|part| part.strip_prefix(prefix)?.parse().ok())
        .collect()
}
