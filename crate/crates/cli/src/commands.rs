//! The five commands. Each returns an [`Output`]; failing checks set
//! `pass = false` rather than returning an error.

use std::fmt::Write as _;

use encoded_gates::circuit::Circuit;
use encoded_gates::codes::CodeSpec;
use encoded_gates::gates::{build, v_gate, GateKind};
use encoded_gates::logical::{
    cnot_matrix, compare_up_to_phase, control_block_phases, decode_register, encode_label, format_complex,
    measure_logical_action, phase_label, toffoli_matrix, ComplexMatrix, LogicalBasis, LEAKAGE_TOLERANCE,
    MATRIX_TOLERANCE,
};
use encoded_gates::recovery::{enumerate_faults, format_joint, sweep, RecoveryOutcome, RecoveryTable, RECOVERY_TOLERANCE};
use encoded_gates::Result;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Command, RunConfig};
use crate::report::{Output, Report};

pub fn run(config: &RunConfig) -> Result<Output> {
    match config.command {
        Command::VerifyGate => cmd_verify_gate(config),
        Command::TruthTable => cmd_truth_table(config),
        Command::SweepErrors => cmd_sweep_errors(config),
        Command::DumpCode => cmd_dump_code(config),
        Command::DumpCircuit => cmd_dump_circuit(config),
    }
}

fn config_echo(config: &RunConfig) -> Value {
    serde_json::to_value(config).expect("config serializes")
}

fn circuit_for(config: &RunConfig) -> Result<(CodeSpec, Circuit)> {
    let code = CodeSpec::new(config.code);
    let circuit = build(config.gate, &code, &v_gate(config.v))?;
    Ok((code, circuit))
}

fn ideal_for(gate: GateKind) -> (&'static str, ComplexMatrix) {
    if gate.is_toffoli() {
        ("toffoli", toffoli_matrix())
    } else {
        ("cnot", cnot_matrix())
    }
}

/// Control bits of block `c` as `(1,1)`.
fn control_tuple(c: usize, bits: usize) -> String {
    let parts: Vec<String> = (0..bits).rev().map(|b| (c >> b & 1).to_string()).collect();
    format!("({})", parts.join(","))
}

/// Summary of a logical action against its ideal gate.
#[derive(Debug, Clone, Serialize)]
pub struct GateCheck {
    pub circuit: String,
    pub basis: LogicalBasis,
    pub ideal: &'static str,
    pub qubits: usize,
    pub ops: usize,
    pub matrix: ComplexMatrix,
    pub leakage: Vec<f64>,
    pub max_leakage: f64,
    pub global_phase: String,
    pub max_deviation: f64,
    pub control_block_phases: Vec<String>,
    pub pass: bool,
    #[serde(skip)]
    pub diagnostics: Vec<String>,
}

pub fn check_gate(circuit: &Circuit, code: &CodeSpec, gate: GateKind) -> Result<GateCheck> {
    let basis = gate.basis();
    let action = measure_logical_action(circuit, code, basis)?;
    let (ideal_name, ideal) = ideal_for(gate);
    let comparison = compare_up_to_phase(&action.matrix, &ideal);
    let phases = control_block_phases(&action.matrix, &ideal, 1);
    let control_bits = circuit.layout.num_blocks() - 1;

    let mut diagnostics = Vec::new();
    for (column, &leak) in action.leakage.iter().enumerate() {
        if leak > LEAKAGE_TOLERANCE {
            diagnostics.push(format!("column {column} leaks {leak:e} out of the code space"));
        }
    }
    if !comparison.matches(MATRIX_TOLERANCE) {
        for (c, &p) in phases.iter().enumerate() {
            let label = phase_label(p);
            if label != "1" {
                diagnostics.push(format!(
                    "phase deviation {label} on {} control block",
                    control_tuple(c, control_bits)
                ));
            }
        }
        diagnostics.push(format!(
            "logical action differs from {ideal_name} by {:e} after removing the global phase",
            comparison.max_deviation
        ));
    }
    let max_leakage = action.max_leakage();
    Ok(GateCheck {
        circuit: circuit.name.clone(),
        basis,
        ideal: ideal_name,
        qubits: circuit.layout.total_qubits(),
        ops: circuit.len(),
        pass: max_leakage <= LEAKAGE_TOLERANCE && comparison.matches(MATRIX_TOLERANCE),
        matrix: action.matrix,
        leakage: action.leakage,
        max_leakage,
        global_phase: format_complex(comparison.global_phase),
        max_deviation: comparison.max_deviation,
        control_block_phases: phases.into_iter().map(phase_label).collect(),
        diagnostics,
    })
}

pub fn cmd_verify_gate(config: &RunConfig) -> Result<Output> {
    let (code, circuit) = circuit_for(config)?;
    let check = check_gate(&circuit, &code, config.gate)?;
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} on {} ({} qubits, {} ops), labels {}",
        check.circuit,
        code.name,
        check.qubits,
        check.ops,
        check.basis.as_str()
    );
    let _ = writeln!(text, "logical action:\n{}", check.matrix);
    let _ = writeln!(
        text,
        "max leakage {:e}, deviation from {} {:e} (global phase {})",
        check.max_leakage, check.ideal, check.max_deviation, check.global_phase
    );
    for d in &check.diagnostics {
        let _ = writeln!(text, "! {d}");
    }
    let _ = writeln!(text, "{}", if check.pass { "PASS" } else { "FAIL" });
    let report = Report::new(
        Command::VerifyGate.as_str(),
        config_echo(config),
        serde_json::to_value(&check).expect("serializes"),
        check.diagnostics.clone(),
        check.pass,
    );
    Ok(Output { report, text, csv: None })
}

#[derive(Debug, Clone, Serialize)]
pub struct TruthRow {
    pub ci: u8,
    pub cii: u8,
    pub operation: &'static str,
    pub expected_action: &'static str,
    /// Target outcome for target input 0 and 1.
    pub outputs: [u8; 2],
    pub probabilities: [f64; 2],
    pub phase: String,
    /// Whether step 1 changed the state, i.e. V really fired.
    pub step1_changed_state: bool,
    pub pass: bool,
}

pub const TABLE_ROWS: [(u8, u8, &str, &str); 4] = [
    (0, 0, "I", "unchanged"),
    (1, 0, "VV^dg = I", "unchanged"),
    (0, 1, "V^dg V = I", "unchanged"),
    (1, 1, "VV = U", "flipped"),
];

const STATE_CHANGE_THRESHOLD: f64 = 1e-6;

pub fn truth_rows(circuit: &Circuit, code: &CodeSpec, basis: LogicalBasis) -> Result<(Vec<TruthRow>, Vec<String>)> {
    let step1 = circuit
        .step_range("1: V by CI")
        .ok_or_else(|| encoded_gates::Error::Internal(format!("{} has no step 1", circuit.name)))?;
    let mut reference_phase: Option<Complex64> = None;
    let mut rows = Vec::new();
    let mut diagnostics = Vec::new();
    for (ci, cii, operation, expected_action) in TABLE_ROWS {
        let flips = expected_action == "flipped";
        let mut outputs = [0u8; 2];
        let mut probabilities = [0.0; 2];
        let mut phases = [Complex64::new(1.0, 0.0); 2];
        let mut step1_changed_state = false;
        for t in 0..2u8 {
            let label = (ci as usize) << 2 | (cii as usize) << 1 | t as usize;
            let expected = if flips { label ^ 1 } else { label };
            let mut state = encode_label(code, &circuit.layout, basis, label)?;
            circuit.run_range(&mut state, 0..step1.start)?;
            let snapshot = state.clone();
            circuit.run_range(&mut state, step1.clone())?;
            step1_changed_state |= state.max_abs_diff(&snapshot) > STATE_CHANGE_THRESHOLD;
            circuit.run_range(&mut state, step1.end..circuit.len())?;
            let (coeffs, leakage) = decode_register(code, &circuit.layout, basis, &state)?;
            let (best, amp) = coeffs
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .map(|(k, a)| (k, *a))
                .expect("nonempty");
            outputs[t as usize] = (best & 1) as u8;
            probabilities[t as usize] = coeffs[expected].norm_sqr();
            phases[t as usize] = amp / amp.norm();
            if leakage > LEAKAGE_TOLERANCE {
                diagnostics.push(format!("row ({ci},{cii}) t={t}: leakage {leakage:e}"));
            }
        }
        let base = *reference_phase.get_or_insert(phases[0]);
        let relative = phases[0] / base;
        let consistent = (phases[1] - phases[0]).norm() < 1e-9;
        let phase_ok = consistent && (relative - Complex64::new(1.0, 0.0)).norm() < 1e-9;
        let populations_ok = probabilities.iter().all(|&p| p >= 1.0 - MATRIX_TOLERANCE);
        let snapshot_ok = step1_changed_state == (ci == 1);
        if !populations_ok {
            diagnostics.push(format!("row ({ci},{cii}): target is not {expected_action}"));
        }
        if !phase_ok {
            diagnostics.push(format!(
                "phase deviation {} on ({ci},{cii}) control block",
                phase_label(relative)
            ));
        }
        if !snapshot_ok {
            diagnostics.push(format!(
                "row ({ci},{cii}): step 1 {} the state",
                if step1_changed_state { "changed" } else { "did not change" }
            ));
        }
        rows.push(TruthRow {
            ci,
            cii,
            operation,
            expected_action,
            outputs,
            probabilities,
            phase: phase_label(relative),
            step1_changed_state,
            pass: populations_ok && phase_ok && snapshot_ok,
        });
    }
    Ok((rows, diagnostics))
}

pub fn cmd_truth_table(config: &RunConfig) -> Result<Output> {
    let (code, circuit) = circuit_for(config)?;
    let basis = config.gate.basis();
    let (rows, diagnostics) = truth_rows(&circuit, &code, basis)?;
    let pass = rows.iter().all(|r| r.pass) && diagnostics.is_empty();
    let mut text = format!("{} on {}, labels {}\n", circuit.name, code.name, basis.as_str());
    let _ = writeln!(text, "CI CII  operation    target     phase  step1  ok");
    for r in &rows {
        let _ = writeln!(
            text,
            "{:<2} {:<3}  {:<11} {:<10} {:<6} {:<6} {}",
            r.ci,
            r.cii,
            r.operation,
            r.expected_action,
            r.phase,
            if r.step1_changed_state { "moved" } else { "idle" },
            if r.pass { "yes" } else { "no" }
        );
    }
    for d in &diagnostics {
        let _ = writeln!(text, "! {d}");
    }
    let results = json!({ "circuit": circuit.name, "basis": basis, "rows": rows });
    let report = Report::new(Command::TruthTable.as_str(), config_echo(config), results, diagnostics, pass);
    Ok(Output { report, text, csv: None })
}

/// One sweep row in the CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub circuit: String,
    pub code: String,
    pub fault_kind: String,
    pub fault_qubit: String,
    pub fault_position: usize,
    pub syndrome_tuple: String,
    pub correction: String,
    pub fidelity: f64,
    pub recovered: bool,
}

fn sweep_row(circuit: &Circuit, code: &CodeSpec, outcome: &RecoveryOutcome) -> SweepRow {
    let fault = outcome.faults.first().expect("single-fault sweep");
    SweepRow {
        circuit: circuit.name.clone(),
        code: code.name.to_string(),
        fault_kind: fault.kind.to_string(),
        fault_qubit: circuit.layout.qubit_label(fault.qubit),
        fault_position: fault.position,
        syndrome_tuple: format_joint(&outcome.syndromes),
        correction: outcome.correction.clone().unwrap_or_else(|| "unknown syndrome".into()),
        fidelity: outcome.fidelity,
        recovered: outcome.recovered,
    }
}

pub fn rows_to_csv(rows: &[SweepRow]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    if rows.is_empty() {
        writer
            .write_record([
                "circuit",
                "code",
                "fault_kind",
                "fault_qubit",
                "fault_position",
                "syndrome_tuple",
                "correction",
                "fidelity",
                "recovered",
            ])
            .expect("in-memory write");
    }
    for row in rows {
        writer.serialize(row).expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("flush")).expect("utf-8")
}

/// Table construction and sweep over `config.scope()`.
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub conditional_phase: Vec<Value>,
    pub table_error: Option<String>,
    pub num_syndromes: usize,
}

pub fn run_sweep(config: &RunConfig) -> Result<SweepResult> {
    let (code, circuit) = circuit_for(config)?;
    let faults = enumerate_faults(&circuit, &config.faults, &config.scope());
    let table = match RecoveryTable::build(&circuit, &code, &faults) {
        Ok(t) => t,
        Err(e) => {
            return Ok(SweepResult {
                rows: Vec::new(),
                conditional_phase: Vec::new(),
                table_error: Some(e.to_string()),
                num_syndromes: 0,
            })
        }
    };
    let outcomes = sweep(&circuit, &table, &faults, config.gate.basis(), config.seed)?;
    let conditional_phase = table
        .conditional_phase_entries()
        .map(|(syndrome, entry)| {
            json!({
                "syndrome_tuple": format_joint(syndrome),
                "correction": entry.correction.describe(&circuit.layout),
                "faults": entry.faults.iter().map(|f| f.describe(&circuit.layout)).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(SweepResult {
        rows: outcomes.iter().map(|o| sweep_row(&circuit, &code, o)).collect(),
        conditional_phase,
        table_error: None,
        num_syndromes: table.entries.len(),
    })
}

pub fn cmd_sweep_errors(config: &RunConfig) -> Result<Output> {
    let result = run_sweep(config)?;
    let mut diagnostics: Vec<String> = result.table_error.iter().cloned().collect();
    let failed: Vec<&SweepRow> = result.rows.iter().filter(|r| !r.recovered).collect();
    for r in &failed {
        diagnostics.push(format!(
            "{} on {} @{} not recovered (fidelity {})",
            r.fault_kind, r.fault_qubit, r.fault_position, r.fidelity
        ));
    }
    let pass = result.table_error.is_none() && failed.is_empty();
    let mut text = String::new();
    let _ = writeln!(
        text,
        "{} on {}: {} faults, {} syndrome classes, {} recovered",
        config.gate,
        config.code,
        result.rows.len(),
        result.num_syndromes,
        result.rows.len() - failed.len()
    );
    for r in &result.rows {
        let _ = writeln!(
            text,
            "{} {:<6} @{:<3} {:<14} {:<20} {}",
            r.fault_kind,
            r.fault_qubit,
            r.fault_position,
            r.syndrome_tuple,
            r.correction,
            if r.recovered { "ok" } else { "FAILED" }
        );
    }
    for c in &result.conditional_phase {
        let _ = writeln!(text, "conditional phase: {}", c["correction"].as_str().unwrap_or_default());
    }
    for d in &diagnostics {
        let _ = writeln!(text, "! {d}");
    }
    let results = json!({
        "circuit": config.gate,
        "code": config.code,
        "basis": config.gate.basis(),
        "recovery_tolerance": RECOVERY_TOLERANCE,
        "syndrome_classes": result.num_syndromes,
        "table_error": result.table_error,
        "conditional_phase_entries": result.conditional_phase,
        "rows": result.rows,
    });
    let csv = Some(rows_to_csv(&result.rows));
    let report = Report::new(Command::SweepErrors.as_str(), config_echo(config), results, diagnostics, pass);
    Ok(Output { report, text, csv })
}

pub fn cmd_dump_code(config: &RunConfig) -> Result<Output> {
    let code = CodeSpec::new(config.code);
    let value = code.to_json();
    let mut text = serde_json::to_string_pretty(&value).expect("serializes");
    text.push('\n');
    let report = Report::new(Command::DumpCode.as_str(), config_echo(config), value, Vec::new(), true);
    Ok(Output { report, text, csv: None })
}

pub fn cmd_dump_circuit(config: &RunConfig) -> Result<Output> {
    let (_, circuit) = circuit_for(config)?;
    let text = circuit.dump();
    let results = json!({
        "circuit": circuit.name,
        "qubits": circuit.layout.total_qubits(),
        "ops": circuit.len(),
        "lines": text.lines().collect::<Vec<_>>(),
    });
    let report = Report::new(Command::DumpCircuit.as_str(), config_echo(config), results, Vec::new(), true);
    Ok(Output { report, text, csv: None })
}
