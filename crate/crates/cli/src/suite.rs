//! Acceptance criteria 1-10, run by `--all`.

use std::time::{Duration, Instant};

use encoded_gates::circuit::Circuit;
use encoded_gates::codes::{correct_block, definite_block_syndrome, encode, CodeSpec};
use encoded_gates::gates::{
    build_cnot_fig1a, build_cnot_fig1b, build_cnot_fig1c, build_toffoli_7bit, build_toffoli_fig3a,
    build_toffoli_fig3b, v_gate, GateKind, VVariant,
};
use encoded_gates::logical::{
    cnot_matrix, encode_register, logical_action_matrix, random_coefficients, toffoli_matrix, LogicalBasis,
    LEAKAGE_TOLERANCE, MATRIX_TOLERANCE,
};
use encoded_gates::pauli::{Pauli, PauliString};
use encoded_gates::recovery::{
    enumerate_faults, payload_pair, run_and_recover, sweep, FaultScope, PauliError, RecoveryTable, RECOVERY_TOLERANCE,
};
use encoded_gates::{Result, StateVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::commands::{check_gate, truth_rows};
use crate::report::Report;

/// Entrywise tolerance for the (+,-) encoding check.
const DUAL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub details: Value,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn name(id: u8) -> &'static str {
    match id {
        1 => "CNOT on a superposed control",
        2 => "CNOT equivalence",
        3 => "Toffoli truth table",
        4 => "dual basis",
        5 => "seven-bit memory correction",
        6 => "error propagation",
        7 => "Toffoli fault sweep",
        8 => "seven-bit Toffoli",
        9 => "ancilla hygiene",
        10 => "determinism",
        _ => "unknown",
    }
}

/// Runtime each criterion must stay under, where one is set.
pub fn budget(id: u8) -> Option<Duration> {
    let secs = match id {
        1..=3 => 1,
        5 => 5,
        6 => 10,
        7 => 30,
        8 => 120,
        _ => return None,
    };
    Some(Duration::from_secs(secs))
}

fn rng(seed: u64, id: u8) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1000).wrapping_add(id as u64))
}

/// Amplitudes of `a ⊗ b` with `a` on the high qubits.
fn kron(a: &StateVector, b: &StateVector) -> Result<StateVector> {
    let amps = (0..a.dim() * b.dim())
        .map(|i| a.amplitude(i / b.dim()) * b.amplitude(i % b.dim()))
        .collect();
    StateVector::from_amplitudes(a.num_qubits() + b.num_qubits(), amps)
}

fn check(diagnostics: &mut Vec<String>, ok: bool, message: impl FnOnce() -> String) -> bool {
    if !ok {
        diagnostics.push(message());
    }
    ok
}

fn criterion_1(seed: u64, diag: &mut Vec<String>) -> Result<Value> {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1a(&code)?;
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let (zero_l, one_l) = (encode(&code, one, zero)?, encode(&code, zero, one)?);
    let mut rng = rng(seed, 1);
    let mut min_fidelity = f64::INFINITY;
    for _ in 0..100 {
        let ab = random_coefficients(2, &mut rng);
        let q = random_coefficients(2, &mut rng);
        let mut state = kron(&encode(&code, ab[0], ab[1])?, &encode(&code, q[0], q[1])?)?;
        circuit.run(&mut state)?;
        // alpha|0_L>|Q> + beta|1_L>|-Q>, with |-Q> = a|1_L> + b|0_L>.
        let q_plus = encode(&code, q[0], q[1])?;
        let q_minus = encode(&code, q[1], q[0])?;
        let amps = (0..64)
            .map(|i| {
                ab[0] * zero_l.amplitude(i >> 3) * q_plus.amplitude(i & 7)
                    + ab[1] * one_l.amplitude(i >> 3) * q_minus.amplitude(i & 7)
            })
            .collect();
        let expected = StateVector::from_amplitudes(6, amps)?;
        min_fidelity = min_fidelity.min(state.fidelity(&expected)?);
    }
    check(diag, min_fidelity >= 1.0 - MATRIX_TOLERANCE, || {
        format!("minimum fidelity {min_fidelity} below 1 - {MATRIX_TOLERANCE:e}")
    });
    Ok(json!({ "payloads": 100, "min_fidelity": min_fidelity }))
}

fn criterion_2(diag: &mut Vec<String>) -> Result<Value> {
    let three = CodeSpec::three_bit();
    let seven = CodeSpec::seven_bit();
    let circuits = [
        (build_cnot_fig1a(&three)?, &three),
        (build_cnot_fig1b(&three)?, &three),
        (build_cnot_fig1c(&three)?, &three),
        (build_cnot_fig1a(&seven)?, &seven),
    ];
    let mut rows = Vec::new();
    for (circuit, code) in &circuits {
        let action = logical_action_matrix(circuit, code, LogicalBasis::Computational)?;
        let deviation = action.matrix.max_abs_diff(&cnot_matrix());
        check(diag, deviation <= MATRIX_TOLERANCE, || {
            format!("{} deviates from CNOT by {deviation:e}", circuit.name)
        });
        rows.push(json!({
            "circuit": circuit.name,
            "qubits": circuit.layout.total_qubits(),
            "max_deviation": deviation,
            "max_leakage": action.max_leakage(),
        }));
    }
    Ok(json!({ "circuits": rows }))
}

fn criterion_3(diag: &mut Vec<String>) -> Result<Value> {
    let code = CodeSpec::three_bit();
    let exact = build_toffoli_fig3a(&code, &v_gate(VVariant::Exact))?;
    let action = logical_action_matrix(&exact, &code, LogicalBasis::Computational)?;
    let deviation = action.matrix.max_abs_diff(&toffoli_matrix());
    check(diag, deviation <= MATRIX_TOLERANCE, || format!("fig3a deviates from Toffoli by {deviation:e}"));
    let (rows, row_diag) = truth_rows(&exact, &code, LogicalBasis::Computational)?;
    diag.extend(row_diag);
    check(diag, rows.iter().all(|r| r.pass), || "a truth-table row does not match its label".into());

    let paper = build_toffoli_fig3a(&code, &v_gate(VVariant::Paper))?;
    let paper_check = check_gate(&paper, &code, GateKind::Fig3a)?;
    let expected = "phase deviation i on (1,1) control block";
    let detected = !paper_check.pass && paper_check.diagnostics.iter().any(|d| d == expected);
    check(diag, detected, || format!("v=paper: expected {expected:?}, got {:?}", paper_check.diagnostics));
    Ok(json!({
        "max_deviation": deviation,
        "rows": rows,
        "paper_v_block_phases": paper_check.control_block_phases,
        "paper_v_detected": detected,
    }))
}

fn criterion_4(diag: &mut Vec<String>) -> Result<Value> {
    let code = CodeSpec::three_bit();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut encoding_deviation: f64 = 0.0;
    for sign in [1.0, -1.0] {
        let state = encode(&code, Complex64::new(h, 0.0), Complex64::new(sign * h, 0.0))?;
        // |+++> or |--->: each set bit contributes `sign`.
        for i in 0..8usize {
            let expected = sign.powi(i.count_ones() as i32) / 8f64.sqrt();
            encoding_deviation = encoding_deviation.max((state.amplitude(i) - expected).norm());
        }
    }
    check(diag, encoding_deviation <= DUAL_TOLERANCE, || {
        format!("(1,±1)/√2 encodings deviate from |±±±> by {encoding_deviation:e}")
    });
    let circuit = build_toffoli_fig3b(&code, &v_gate(VVariant::Exact))?;
    let action = logical_action_matrix(&circuit, &code, LogicalBasis::Dual)?;
    let deviation = action.matrix.max_abs_diff(&toffoli_matrix());
    check(diag, deviation <= MATRIX_TOLERANCE, || format!("fig3b deviates from Toffoli by {deviation:e}"));
    Ok(json!({
        "encoding_deviation": encoding_deviation,
        "fig3b_max_deviation": deviation,
        "fig3b_max_leakage": action.max_leakage(),
    }))
}

fn criterion_5(seed: u64, diag: &mut Vec<String>) -> Result<Value> {
    let code = CodeSpec::seven_bit();
    let mut rng = rng(seed, 5);
    let mut min_fidelity = f64::INFINITY;
    let mut corrected = 0;
    for payload in 0..8u64 {
        let ab = random_coefficients(2, &mut rng);
        let clean = encode(&code, ab[0], ab[1])?;
        for pos in 0..code.block_size {
            for kind in Pauli::NONTRIVIAL {
                let mut state = clean.clone();
                state.apply_pauli(&PauliString::single(code.block_size, pos, kind).on_register())?;
                let fixed = encoded_gates::codes::correct_memory(&code, &state, seed ^ payload)?;
                let f = fixed.fidelity(&clean)?;
                min_fidelity = min_fidelity.min(f);
                if f >= 1.0 - RECOVERY_TOLERANCE {
                    corrected += 1;
                } else {
                    diag.push(format!("{kind} on qubit {pos}, payload {payload}: fidelity {f}"));
                }
            }
        }
    }
    Ok(json!({ "errors": 21, "payloads": 8, "corrected": corrected, "min_fidelity": min_fidelity }))
}

fn post_gate_syndromes(circuit: &Circuit, code: &CodeSpec, input: &StateVector, fault: PauliError) -> Result<Vec<String>> {
    let mut state = input.clone();
    circuit.run_with_faults(&mut state, &[fault])?;
    Ok(circuit
        .layout
        .blocks()
        .iter()
        .map(|b| definite_block_syndrome(code, &state, &b.qubits).map_or("indefinite".into(), |s| s.to_string()))
        .collect())
}

fn criterion_6(seed: u64, diag: &mut Vec<String>) -> Result<Value> {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1a(&code)?;
    let c = circuit.layout.block("C").expect("block").qubits.clone();
    let t = circuit.layout.block("T").expect("block").qubits.clone();
    let faults = enumerate_faults(&circuit, &[Pauli::Z], &FaultScope::blocks(&["C", "T"]));
    let table = RecoveryTable::build(&circuit, &code, &faults)?;
    let idle = |j: usize| code.pauli_syndrome(&PauliString::single(code.block_size, j, Pauli::Z)).to_string();
    let trivial = code.pauli_syndrome(&PauliString::identity(code.block_size)).to_string();

    // On (+,-) labels the physical C byte is the logical target and T the control.
    let (input, reference) = payload_pair(&circuit, &code, LogicalBasis::Dual, seed)?;
    let mut checked = 0;
    for j in 0..code.block_size {
        let fault = PauliError::new(c[j], Pauli::Z, 0);
        let s = post_gate_syndromes(&circuit, &code, &input, fault)?;
        check(diag, s == [idle(j), trivial.clone()], || format!("(a) target flip {j}: syndromes {s:?}"));
        let fault = PauliError::new(t[j], Pauli::Z, 0);
        let s = post_gate_syndromes(&circuit, &code, &input, fault)?;
        check(diag, s == [idle(j), idle(j)] && idle(j) != trivial, || {
            format!("(b) control flip {j}: syndromes {s:?}")
        });
        for f in [PauliError::new(c[j], Pauli::Z, 0), PauliError::new(t[j], Pauli::Z, 0)] {
            let o = run_and_recover(&circuit, &table, &input, &reference, &[f], seed)?;
            check(diag, o.recovered, || format!("(a/b) {} not recovered", f.describe(&circuit.layout)));
            checked += 1;
        }
    }
    let mut swept = 0;
    for basis in [LogicalBasis::Dual, LogicalBasis::Computational] {
        for o in sweep(&circuit, &table, &faults, basis, seed)? {
            check(diag, o.recovered, || format!("{} sweep: {:?} not recovered", basis.as_str(), o.faults));
            swept += 1;
        }
    }

    // (c) On (0,1) labels a control-byte fault stays off the target, and
    // correcting each byte on its own is enough.
    let (input, reference) = payload_pair(&circuit, &code, LogicalBasis::Computational, seed)?;
    let mut memory_corrected = 0;
    for position in 0..=circuit.len() {
        for &q in &c {
            let fault = PauliError::new(q, Pauli::Z, position);
            let s = post_gate_syndromes(&circuit, &code, &input, fault)?;
            check(diag, s[1] == trivial, || format!("(c) {}: target syndrome {}", fault.describe(&circuit.layout), s[1]));
            let mut state = input.clone();
            circuit.run_with_faults(&mut state, &[fault])?;
            let state = correct_block(&code, &state, &c, seed)?;
            let state = correct_block(&code, &state, &t, seed.wrapping_add(1))?;
            let f = state.fidelity(&reference)?;
            if check(diag, f >= 1.0 - RECOVERY_TOLERANCE, || {
                format!("(c) {}: memory correction fidelity {f}", fault.describe(&circuit.layout))
            }) {
                memory_corrected += 1;
            }
        }
    }
    Ok(json!({
        "pre_gate_faults_checked": checked,
        "sweep_runs_recovered": swept,
        "control_faults_memory_corrected": memory_corrected,
    }))
}

fn criterion_7(seed: u64, diag: &mut Vec<String>) -> Result<Value> {
    let code = CodeSpec::three_bit();
    let circuit = build_toffoli_fig3a(&code, &v_gate(VVariant::Exact))?;
    let faults = enumerate_faults(&circuit, &[Pauli::Z], &FaultScope::blocks(&["CI", "CII"]));
    let table = match RecoveryTable::build(&circuit, &code, &faults) {
        Ok(t) => t,
        Err(e) => {
            diag.push(e.to_string());
            return Ok(json!({ "faults": faults.len(), "table_error": e.to_string() }));
        }
    };
    let outcomes = sweep(&circuit, &table, &faults, LogicalBasis::Computational, seed)?;
    let recovered = outcomes.iter().filter(|o| o.recovered).count();
    check(diag, recovered == faults.len(), || {
        format!("{} of {} faults not recovered", faults.len() - recovered, faults.len())
    });
    let min_fidelity = outcomes.iter().map(|o| o.fidelity).fold(f64::INFINITY, f64::min);
    Ok(json!({
        "faults": faults.len(),
        "syndrome_classes": table.entries.len(),
        "ambiguities": 0,
        "recovered": recovered,
        "min_fidelity": min_fidelity,
    }))
}

fn criterion_8(diag: &mut Vec<String>) -> Result<Value> {
    let code = CodeSpec::seven_bit();
    let circuit = build_toffoli_7bit(&code, &v_gate(VVariant::Exact))?;
    let action = logical_action_matrix(&circuit, &code, LogicalBasis::Computational)?;
    let deviation = action.matrix.max_abs_diff(&toffoli_matrix());
    check(diag, deviation <= MATRIX_TOLERANCE, || format!("toffoli7 deviates from Toffoli by {deviation:e}"));
    Ok(json!({
        "qubits": circuit.layout.total_qubits(),
        "max_deviation": deviation,
        "max_leakage": action.max_leakage(),
    }))
}

fn criterion_9(seed: u64, diag: &mut Vec<String>) -> Result<Value> {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1c(&code)?;
    let anc = circuit.layout.ancillas()[0];
    let mut rng = rng(seed, 9);
    let mut min_purity = f64::INFINITY;
    let mut min_zero = f64::INFINITY;
    for _ in 0..20 {
        let coeffs = random_coefficients(4, &mut rng);
        let mut state = encode_register(&code, &circuit.layout, LogicalBasis::Computational, &coeffs)?;
        circuit.run(&mut state)?;
        let rho = state.reduced_density_matrix(&[anc])?;
        min_purity = min_purity.min(rho.purity());
        min_zero = min_zero.min(rho.entry(0, 0).re);
    }
    check(diag, min_purity >= 1.0 - LEAKAGE_TOLERANCE && min_zero >= 1.0 - LEAKAGE_TOLERANCE, || {
        format!("ancilla purity {min_purity}, <0|rho|0> {min_zero}")
    });
    Ok(json!({ "inputs": 20, "min_purity": min_purity, "min_ground_population": min_zero }))
}

/// Runs one of criteria 1-9.
pub fn run_criterion(id: u8, seed: u64) -> Result<CriterionResult> {
    let start = Instant::now();
    let mut diagnostics = Vec::new();
    let details = match id {
        1 => criterion_1(seed, &mut diagnostics)?,
        2 => criterion_2(&mut diagnostics)?,
        3 => criterion_3(&mut diagnostics)?,
        4 => criterion_4(&mut diagnostics)?,
        5 => criterion_5(seed, &mut diagnostics)?,
        6 => criterion_6(seed, &mut diagnostics)?,
        7 => criterion_7(seed, &mut diagnostics)?,
        8 => criterion_8(&mut diagnostics)?,
        9 => criterion_9(seed, &mut diagnostics)?,
        _ => return Err(encoded_gates::Error::Internal(format!("no criterion {id}"))),
    };
    Ok(CriterionResult {
        id,
        name: name(id),
        pass: diagnostics.is_empty(),
        details,
        diagnostics,
        elapsed: start.elapsed(),
    })
}

pub fn run_criteria(seed: u64) -> Result<Vec<CriterionResult>> {
    (1..=9).map(|id| run_criterion(id, seed)).collect()
}

/// Criteria 1-9 twice, then 10 comparing the two serialized runs.
pub fn run_all(seed: u64) -> Result<Vec<CriterionResult>> {
    let mut first = run_criteria(seed)?;
    let start = Instant::now();
    let second = run_criteria(seed)?;
    let a = serde_json::to_string(&first).expect("serializes");
    let b = serde_json::to_string(&second).expect("serializes");
    let same = a == b;
    first.push(CriterionResult {
        id: 10,
        name: name(10),
        pass: same,
        details: json!({ "runs": 2, "identical": same, "bytes": a.len() }),
        diagnostics: if same { Vec::new() } else { vec!["criteria 1-9 differ between two runs".into()] },
        elapsed: start.elapsed(),
    });
    Ok(first)
}

pub fn report(results: &[CriterionResult], seed: u64) -> Report {
    let diagnostics = results
        .iter()
        .flat_map(|r| r.diagnostics.iter().map(move |d| format!("criterion {}: {d}", r.id)))
        .collect();
    Report::new(
        "all",
        json!({ "seed": seed }),
        json!({ "criteria": results }),
        diagnostics,
        results.iter().all(|r| r.pass),
    )
}

/// One line per criterion, with wall-clock time and budget.
pub fn summary_table(results: &[CriterionResult]) -> String {
    let mut out = format!("{:>3}  {:<30} {:<6} {:>9}  {}\n", "#", "criterion", "result", "time", "budget");
    for r in results {
        let budget = budget(r.id).map_or("-".to_string(), |b| format!("{}s", b.as_secs()));
        out.push_str(&format!(
            "{:>3}  {:<30} {:<6} {:>8.3}s  {}\n",
            r.id,
            r.name,
            if r.pass { "PASS" } else { "FAIL" },
            r.elapsed.as_secs_f64(),
            budget
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_puts_the_first_factor_high() {
        let a = StateVector::basis_state(1, "1").unwrap();
        let b = StateVector::basis_state(2, "01").unwrap();
        let k = kron(&a, &b).unwrap();
        assert_eq!(k.amplitude(0b101), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn every_criterion_has_a_name() {
        assert!((1..=10).all(|id| name(id) != "unknown"));
    }
}
