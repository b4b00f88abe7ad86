//! Encoded CNOT and Toffoli circuits on physical qubits.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{BlockLayout, Circuit, Op};
use crate::codes::{CodeName, CodeSpec};
use crate::error::{Error, Result};
use crate::statevec::GateMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VVariant {
    /// `(1/sqrt 2)[[1, i], [i, 1]]`, whose square is `iX`.
    Paper,
    /// The same matrix times `e^{-i pi/4}`, whose square is `X`.
    #[default]
    Exact,
}

impl VVariant {
    pub fn as_str(self) -> &'static str {
        match self {
            VVariant::Paper => "paper",
            VVariant::Exact => "exact",
        }
    }
}

impl fmt::Display for VVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "paper" => Ok(VVariant::Paper),
            "exact" => Ok(VVariant::Exact),
            other => Err(Error::Layout(format!("unknown V variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VGate {
    pub variant: VVariant,
    pub matrix: GateMatrix,
}

pub fn v_gate(variant: VVariant) -> VGate {
    let a = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let b = Complex64::new(0.0, FRAC_1_SQRT_2);
    let phase = match variant {
        VVariant::Paper => Complex64::new(1.0, 0.0),
        VVariant::Exact => Complex64::from_polar(1.0, -FRAC_PI_4),
    };
    let entries = [a, b, b, a].iter().map(|&e| e * phase).collect();
    let matrix = GateMatrix::new(format!("V_{}", variant.as_str()), 1, entries).expect("V is unitary");
    VGate { variant, matrix }
}

/// How a whole block's logical value controls a gate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QubyteControl {
    /// One op conditioned on the parity of every qubit in the block.
    #[default]
    ParityGate,
    /// Fold the parity onto the block's first qubit with intra-block cnots,
    /// control from that qubit, unfold.
    Fold,
}

/// Which encoded circuit to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    Fig1a,
    Fig1b,
    Fig1c,
    Fig2,
    Fig3a,
    Fig3b,
    Toffoli7,
}

impl GateKind {
    pub const ALL: [GateKind; 7] = [
        GateKind::Fig1a,
        GateKind::Fig1b,
        GateKind::Fig1c,
        GateKind::Fig2,
        GateKind::Fig3a,
        GateKind::Fig3b,
        GateKind::Toffoli7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GateKind::Fig1a => "fig1a",
            GateKind::Fig1b => "fig1b",
            GateKind::Fig1c => "fig1c",
            GateKind::Fig2 => "fig2",
            GateKind::Fig3a => "fig3a",
            GateKind::Fig3b => "fig3b",
            GateKind::Toffoli7 => "toffoli7",
        }
    }

    /// The only code each construction accepts. `fig1a` takes either.
    pub fn required_code(self) -> Option<CodeName> {
        match self {
            GateKind::Fig1a => None,
            GateKind::Fig2 | GateKind::Toffoli7 => Some(CodeName::SevenBit),
            _ => Some(CodeName::ThreeBit),
        }
    }

    pub fn default_code(self) -> CodeName {
        self.required_code().unwrap_or(CodeName::ThreeBit)
    }

    pub fn is_toffoli(self) -> bool {
        matches!(self, GateKind::Fig3a | GateKind::Fig3b | GateKind::Toffoli7)
    }

    /// Label basis the logical action is stated in.
    pub fn basis(self) -> crate::logical::LogicalBasis {
        match self {
            GateKind::Fig3b => crate::logical::LogicalBasis::Dual,
            _ => crate::logical::LogicalBasis::Computational,
        }
    }

    pub fn check_code(self, code: CodeName) -> Result<()> {
        match self.required_code() {
            Some(required) if required != code => Err(Error::IncompatibleCode {
                gate: self.as_str().to_string(),
                expected: required.as_str().to_string(),
                got: code.as_str().to_string(),
            }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        GateKind::ALL
            .into_iter()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| Error::Layout(format!("unknown gate {s:?}")))
    }
}

/// Builds `kind` for `code`, with the default qubyte control.
pub fn build(kind: GateKind, code: &CodeSpec, v: &VGate) -> Result<Circuit> {
    kind.check_code(code.name)?;
    match kind {
        GateKind::Fig1a | GateKind::Fig2 => build_cnot_fig1a(code),
        GateKind::Fig1b => build_cnot_fig1b(code),
        GateKind::Fig1c => build_cnot_fig1c(code),
        GateKind::Fig3a => build_toffoli_fig3a(code, v),
        GateKind::Fig3b => build_toffoli_fig3b(code, v),
        GateKind::Toffoli7 => build_toffoli_7bit(code, v),
    }
}

fn require(code: &CodeSpec, expected: CodeName, gate: &str) -> Result<()> {
    if code.name != expected {
        return Err(Error::IncompatibleCode {
            gate: gate.to_string(),
            expected: expected.as_str().to_string(),
            got: code.name.as_str().to_string(),
        });
    }
    Ok(())
}

fn qubits(layout: &BlockLayout, name: &str) -> Vec<usize> {
    layout.block(name).expect("block exists").qubits.clone()
}

/// Transversal CNOT, control byte `C` onto target byte `T`. Named `fig2` for
/// the seven-bit code.
pub fn build_cnot_fig1a(code: &CodeSpec) -> Result<Circuit> {
    let n = code.block_size;
    let name = match code.name {
        CodeName::ThreeBit => "fig1a",
        CodeName::SevenBit => "fig2",
    };
    let layout = BlockLayout::stacked(&["C", "T"], n, 0);
    let (c, t) = (qubits(&layout, "C"), qubits(&layout, "T"));
    let mut circuit = Circuit::new(name, layout);
    // The target byte's X-type checks commute with cnots into it, so it stays
    // checkable halfway through; for seven bits the Z-type checks do not.
    let mid: &[&str] = match code.name {
        CodeName::ThreeBit => &["T"],
        CodeName::SevenBit => &[],
    };
    circuit.checkpoint(&["C", "T"]);
    circuit.step("transversal cnot", |circ| {
        for i in 0..n {
            circ.cnot(c[i], t[i]);
            circ.checkpoint(if i + 1 == n { &["C", "T"] } else { mid });
        }
    });
    Ok(circuit)
}

/// Every control qubit drives the target byte's top qubit.
pub fn build_cnot_fig1b(code: &CodeSpec) -> Result<Circuit> {
    require(code, CodeName::ThreeBit, "fig1b")?;
    let layout = BlockLayout::stacked(&["C", "T"], 3, 0);
    let (c, t) = (qubits(&layout, "C"), qubits(&layout, "T"));
    let mut circuit = Circuit::new("fig1b", layout);
    circuit.checkpoint(&["C", "T"]);
    circuit.step("cnots onto top qubit", |circ| {
        for (i, &q) in c.iter().enumerate() {
            circ.cnot(q, t[0]);
            circ.checkpoint(if i == 2 { &["C", "T"] } else { &["T"] });
        }
    });
    Ok(circuit)
}

/// Control parity accumulated on an ancilla, copied to the target top qubit,
/// then uncomputed.
pub fn build_cnot_fig1c(code: &CodeSpec) -> Result<Circuit> {
    require(code, CodeName::ThreeBit, "fig1c")?;
    let layout = BlockLayout::stacked(&["C", "T"], 3, 1);
    let (c, t) = (qubits(&layout, "C"), qubits(&layout, "T"));
    let anc = layout.ancillas()[0];
    let mut circuit = Circuit::new("fig1c", layout);
    circuit.checkpoint(&["C", "T"]);
    let accumulate = |circ: &mut Circuit| {
        for (i, &q) in c.iter().enumerate() {
            circ.cnot(q, anc);
            circ.checkpoint(if i == 2 { &["C", "T"] } else { &["T"] });
        }
    };
    circuit.step("accumulate parity", accumulate);
    circuit.step("flip target", |circ| {
        circ.cnot(anc, t[0]);
        circ.checkpoint(&["C", "T"]);
    });
    circuit.step("uncompute parity", accumulate);
    Ok(circuit)
}

/// Qubits of the lightest word in `|1_L>`: X on them maps `|0_L>` to `|1_L>`.
pub fn logical_x_support(code: &CodeSpec) -> Vec<usize> {
    let word = code
        .codeword_one
        .iter()
        .min_by_key(|w| w.weight())
        .expect("codewords are nonempty");
    (0..code.block_size).filter(|&p| word.bit(p)).collect()
}

/// `a I + b X...X` for `V = [[a, b], [b, a]]` on `weight` qubits.
fn logical_v(v: &GateMatrix, weight: usize) -> GateMatrix {
    if weight == 1 {
        return v.clone();
    }
    let dim = 1usize << weight;
    let (a, b) = (v.entry(0, 0), v.entry(0, 1));
    let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        entries[r * dim + r] = a;
        entries[r * dim + (dim - 1 - r)] = b;
    }
    GateMatrix::new(format!("{}_L{weight}", v.name()), weight, entries).expect("logical V is unitary")
}

/// Pushes a gate on the target byte conditioned on the logical value of
/// `control`. Returns the number of ops added.
fn push_qubyte_controlled(
    circ: &mut Circuit,
    mode: QubyteControl,
    gate: &GateMatrix,
    control: &[usize],
    targets: &[usize],
) -> usize {
    match mode {
        QubyteControl::ParityGate => {
            circ.push(Op::ParityControlled {
                gate: gate.clone(),
                parity: control.to_vec(),
                targets: targets.to_vec(),
            });
            1
        }
        QubyteControl::Fold => {
            let (head, rest) = control.split_first().expect("nonempty block");
            for &q in rest {
                circ.cnot(q, *head);
            }
            circ.push(Op::Controlled {
                gate: gate.clone(),
                controls: vec![*head],
                targets: targets.to_vec(),
            });
            for &q in rest {
                circ.cnot(q, *head);
            }
            2 * rest.len() + 1
        }
    }
}

/// Toffoli from V, V^dagger and V controlled by `CI`, `CI ^ CII`, `CII`,
/// with `CI ^ CII` computed into `CII` by transversal cnots and undone.
fn toffoli_sequence(circuit: &mut Circuit, code: &CodeSpec, v: &VGate, mode: QubyteControl) {
    let layout = circuit.layout.clone();
    let (ci, cii, t) = (qubits(&layout, "CI"), qubits(&layout, "CII"), qubits(&layout, "T"));
    let support: Vec<usize> = logical_x_support(code).into_iter().map(|p| t[p]).collect();
    let gate = logical_v(&v.matrix, support.len());
    let gate_dg = gate.adjoint();
    // Both X- and Z-type checks of CII are disturbed mid-transversal for the
    // seven-bit code; the three-bit code only has X-type checks.
    let mid_cnot: &[&str] = match code.name {
        CodeName::ThreeBit => &["CII", "T"],
        CodeName::SevenBit => &["T"],
    };
    let all = ["CI", "CII", "T"];

    circuit.checkpoint(&all);
    let controlled = |circ: &mut Circuit, g: &GateMatrix, control: &[usize], controlling: &str| {
        let added = push_qubyte_controlled(circ, mode, g, control, &support);
        let end = circ.len();
        if added > 1 {
            // Inside a fold the controlling byte is out of the code.
            let others: Vec<&str> = all.iter().copied().filter(|b| *b != controlling).collect();
            for pos in end - added + 1..end {
                circ.checkpoints.push(crate::circuit::Checkpoint {
                    position: pos,
                    blocks: others.iter().map(|s| s.to_string()).collect(),
                });
            }
        }
        circ.checkpoint(&all);
    };
    let transversal = |circ: &mut Circuit| {
        for i in 0..ci.len() {
            circ.cnot(ci[i], cii[i]);
            circ.checkpoint(if i + 1 == ci.len() { &all } else { mid_cnot });
        }
    };
    circuit.step("1: V by CI", |circ| controlled(circ, &gate, &ci, "CI"));
    circuit.step("2: CII ^= CI", transversal);
    circuit.step("3: V_dg by CI^CII", |circ| controlled(circ, &gate_dg, &cii, "CII"));
    circuit.step("4: restore CII", transversal);
    circuit.step("5: V by CII", |circ| controlled(circ, &gate, &cii, "CII"));
}

pub fn build_toffoli_fig3a(code: &CodeSpec, v: &VGate) -> Result<Circuit> {
    build_toffoli_fig3a_with(code, v, QubyteControl::default())
}

pub fn build_toffoli_fig3a_with(code: &CodeSpec, v: &VGate, mode: QubyteControl) -> Result<Circuit> {
    require(code, CodeName::ThreeBit, "fig3a")?;
    let mut circuit = Circuit::new("fig3a", BlockLayout::stacked(&["CI", "CII", "T"], 3, 0));
    toffoli_sequence(&mut circuit, code, v, mode);
    Ok(circuit)
}

/// Logical Hadamard on one three-bit byte, `|0_L> <-> |+_L>`: undo the
/// `H^3` that turns the byte into a GHZ pair, disentangle, flip the phase
/// qubit's basis and reverse. Self-inverse. Returns the op count.
fn push_byte_hadamard(circ: &mut Circuit, q: &[usize]) -> usize {
    let h = GateMatrix::h();
    let start = circ.len();
    let layer = |circ: &mut Circuit| {
        for &qubit in q {
            circ.push(Op::Unitary {
                gate: h.clone(),
                targets: vec![qubit],
            });
        }
    };
    layer(circ);
    circ.cnot(q[0], q[1]);
    circ.cnot(q[0], q[2]);
    circ.push(Op::Unitary {
        gate: h.clone(),
        targets: vec![q[0]],
    });
    circ.cnot(q[0], q[1]);
    circ.cnot(q[0], q[2]);
    layer(circ);
    circ.len() - start
}

fn hadamard_layer(circuit: &mut Circuit, label: &str) {
    let all = ["CI", "CII", "T"];
    let layout = circuit.layout.clone();
    circuit.step(label, |circ| {
        for name in all {
            let added = push_byte_hadamard(circ, &layout.block(name).expect("block").qubits);
            let end = circ.len();
            let others: Vec<String> = all.iter().filter(|b| **b != name).map(|s| s.to_string()).collect();
            for pos in end - added + 1..end {
                circ.checkpoints.push(crate::circuit::Checkpoint {
                    position: pos,
                    blocks: others.clone(),
                });
            }
            circ.checkpoint(&all);
        }
    });
}

/// Toffoli on the (+, -) labels: fig3a between logical Hadamard layers.
pub fn build_toffoli_fig3b(code: &CodeSpec, v: &VGate) -> Result<Circuit> {
    require(code, CodeName::ThreeBit, "fig3b")?;
    let mut circuit = Circuit::new("fig3b", BlockLayout::stacked(&["CI", "CII", "T"], 3, 0));
    circuit.checkpoint(&["CI", "CII", "T"]);
    hadamard_layer(&mut circuit, "to computational labels");
    toffoli_sequence(&mut circuit, code, v, QubyteControl::default());
    hadamard_layer(&mut circuit, "back to (+,-) labels");
    Ok(circuit)
}

pub fn build_toffoli_7bit(code: &CodeSpec, v: &VGate) -> Result<Circuit> {
    build_toffoli_7bit_with(code, v, QubyteControl::default())
}

pub fn build_toffoli_7bit_with(code: &CodeSpec, v: &VGate, mode: QubyteControl) -> Result<Circuit> {
    require(code, CodeName::SevenBit, "toffoli7")?;
    let mut circuit = Circuit::new("toffoli7", BlockLayout::stacked(&["CI", "CII", "T"], 7, 0));
    toffoli_sequence(&mut circuit, code, v, mode);
    Ok(circuit)
}
