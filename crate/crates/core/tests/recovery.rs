use encoded_gates::circuit::Circuit;
use encoded_gates::codes::{definite_block_syndrome, CodeSpec, Syndrome};
use encoded_gates::error::Error;
use encoded_gates::gates::{
    build_cnot_fig1a, build_cnot_fig1b, build_cnot_fig1c, build_toffoli_fig3a, build_toffoli_fig3a_with, v_gate,
    QubyteControl, VVariant,
};
use encoded_gates::logical::LogicalBasis;
use encoded_gates::pauli::{Pauli, PauliString};
use encoded_gates::recovery::{
    enumerate_fault_points, enumerate_faults, payload_pair, recover_joint, run_and_recover, sweep, FaultScope,
    PauliError, PhaseCorrection, Positions, RecoveryTable, TableOptions,
};

fn sweep_all_recovered(circuit: &Circuit, code: &CodeSpec, faults: &[PauliError], basis: LogicalBasis) {
    let table = RecoveryTable::build(circuit, code, faults).unwrap();
    for seed in [1, 2, 3] {
        let outcomes = sweep(circuit, &table, faults, basis, seed).unwrap();
        assert_eq!(outcomes.len(), faults.len());
        for o in &outcomes {
            assert!(o.recovered, "{} {:?} fidelity {}", circuit.name, o.faults, o.fidelity);
        }
    }
}

#[test]
fn fig1a_z_faults_everywhere_are_recovered() {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1a(&code).unwrap();
    let faults = enumerate_fault_points(&circuit, &[Pauli::Z]);
    assert_eq!(faults.len(), 6 * 4);
    sweep_all_recovered(&circuit, &code, &faults, LogicalBasis::Computational);
    sweep_all_recovered(&circuit, &code, &faults, LogicalBasis::Dual);
}

#[test]
fn fig2_all_single_faults_are_recovered() {
    let code = CodeSpec::seven_bit();
    let circuit = build_cnot_fig1a(&code).unwrap();
    let faults = enumerate_fault_points(&circuit, &Pauli::NONTRIVIAL);
    assert_eq!(faults.len(), 336);
    sweep_all_recovered(&circuit, &code, &faults, LogicalBasis::Computational);
}

#[test]
fn fig3a_control_byte_z_faults_are_recovered() {
    let code = CodeSpec::three_bit();
    let circuit = build_toffoli_fig3a(&code, &v_gate(VVariant::Exact)).unwrap();
    let faults = enumerate_faults(&circuit, &[Pauli::Z], &FaultScope::blocks(&["CI", "CII"]));
    assert_eq!(faults.len(), 6 * 10);
    sweep_all_recovered(&circuit, &code, &faults, LogicalBasis::Computational);
}

#[test]
fn folded_qubyte_control_is_not_recoverable() {
    let code = CodeSpec::three_bit();
    let circuit = build_toffoli_fig3a_with(&code, &v_gate(VVariant::Exact), QubyteControl::Fold).unwrap();
    let faults = enumerate_faults(&circuit, &[Pauli::Z], &FaultScope::blocks(&["CI", "CII"]));
    let err = RecoveryTable::build(&circuit, &code, &faults).unwrap_err();
    assert!(
        matches!(err, Error::AmbiguousSyndrome { .. } | Error::Uncorrectable { .. }),
        "{err}"
    );
}

#[test]
fn fig1b_and_fig1c_recover_faults_before_the_gate() {
    let code = CodeSpec::three_bit();
    for circuit in [build_cnot_fig1b(&code).unwrap(), build_cnot_fig1c(&code).unwrap()] {
        let scope = FaultScope::blocks(&["C", "T"]).at(Positions::Before);
        let faults = enumerate_faults(&circuit, &[Pauli::Z], &scope);
        assert_eq!(faults.len(), 6);
        sweep_all_recovered(&circuit, &code, &faults, LogicalBasis::Computational);

        // A top-target Z before the gate needs the logical sign flip on the control.
        let table = RecoveryTable::build(&circuit, &code, &faults).unwrap();
        let flagged: Vec<_> = table.conditional_phase_entries().collect();
        assert_eq!(flagged.len(), 1, "{}", circuit.name);
        let (_, entry) = flagged[0];
        assert_eq!(entry.correction.phase, PhaseCorrection::LogicalZ(0));
        let top = circuit.layout.block("T").unwrap().qubits[0];
        assert_eq!(entry.faults, [PauliError::new(top, Pauli::Z, 0)]);
    }
}

#[test]
fn fig1b_faults_at_every_slot_are_ambiguous() {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1b(&code).unwrap();
    let faults = enumerate_faults(&circuit, &[Pauli::Z], &FaultScope::blocks(&["C", "T"]));
    let err = RecoveryTable::build(&circuit, &code, &faults).unwrap_err();
    let Error::AmbiguousSyndrome { first, second, .. } = err else {
        panic!("expected an ambiguity, got {err}");
    };
    assert!(first.contains("T.1") && second.contains("T.1"), "{first} / {second}");
}

#[test]
fn fig1a_table_entries() {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1a(&code).unwrap();
    let faults = enumerate_faults(&circuit, &[Pauli::Z], &FaultScope::default().at(Positions::Before));
    let table = RecoveryTable::build(&circuit, &code, &faults).unwrap();
    let c = &circuit.layout.block("C").unwrap().qubits;
    let t = &circuit.layout.block("T").unwrap().qubits;
    let entry_for = |fault: PauliError| {
        table
            .entries
            .values()
            .find(|e| e.faults.contains(&fault))
            .map(|e| e.correction.clone())
            .unwrap()
    };
    for j in 0..3 {
        let single = PauliString::single(3, j, Pauli::Z);
        let on_target = entry_for(PauliError::new(t[j], Pauli::Z, 0));
        assert_eq!(on_target.paulis, [single.clone(), single.clone()]);
        assert_eq!(on_target.phase, PhaseCorrection::None);
        let on_control = entry_for(PauliError::new(c[j], Pauli::Z, 0));
        assert_eq!(on_control.paulis, [single, PauliString::identity(3)]);
    }
    let trivial = vec![Syndrome::trivial(2); 2];
    assert!(table.lookup(&trivial).unwrap().is_identity());
}

#[test]
fn syndromes_do_not_depend_on_the_payload() {
    let code = CodeSpec::seven_bit();
    let circuit = build_cnot_fig1a(&code).unwrap();
    let faults = enumerate_fault_points(&circuit, &Pauli::NONTRIVIAL);
    let options = TableOptions { payloads: 8, seed: 42 };
    RecoveryTable::build_with(&circuit, &code, &faults, &options).unwrap();

    let three = CodeSpec::three_bit();
    let fig3a = build_toffoli_fig3a(&three, &v_gate(VVariant::Exact)).unwrap();
    let faults = enumerate_faults(&fig3a, &[Pauli::Z], &FaultScope::blocks(&["CI", "CII"]));
    RecoveryTable::build_with(&fig3a, &three, &faults, &options).unwrap();
}

#[test]
fn clean_runs_pass_through() {
    let code = CodeSpec::three_bit();
    let circuit = build_toffoli_fig3a(&code, &v_gate(VVariant::Exact)).unwrap();
    let table = RecoveryTable::build(&circuit, &code, &[]).unwrap();
    let (input, reference) = payload_pair(&circuit, &code, LogicalBasis::Computational, 8).unwrap();
    let mut output = input.clone();
    circuit.run(&mut output).unwrap();
    let (fixed, syndromes, correction) = recover_joint(&table, &output, 0).unwrap();
    assert!(syndromes.iter().all(Syndrome::is_trivial));
    assert!(correction.unwrap().is_identity());
    assert!(fixed.max_abs_diff(&reference) <= 1e-12);
}

/// Block syndromes right after the gate, read without measuring.
fn post_gate_syndromes(circuit: &Circuit, code: &CodeSpec, fault: PauliError, basis: LogicalBasis) -> Vec<Syndrome> {
    let (mut state, _) = payload_pair(circuit, code, basis, 17).unwrap();
    circuit.run_with_faults(&mut state, &[fault]).unwrap();
    circuit
        .layout
        .blocks()
        .iter()
        .map(|b| definite_block_syndrome(code, &state, &b.qubits).unwrap())
        .collect()
}

#[test]
fn propagation_claims_in_both_bases() {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1a(&code).unwrap();
    let faults = enumerate_fault_points(&circuit, &[Pauli::Z]);
    let table = RecoveryTable::build(&circuit, &code, &faults).unwrap();
    let c = circuit.layout.block("C").unwrap().qubits.clone();
    let t = circuit.layout.block("T").unwrap().qubits.clone();
    let idle = |j: usize| code.pauli_syndrome(&PauliString::single(3, j, Pauli::Z));
    let trivial = Syndrome::trivial(2);
    let (input, reference) = payload_pair(&circuit, &code, LogicalBasis::Dual, 23).unwrap();
    for j in 0..3 {
        // On (+,-) labels the physical C byte is the logical target: a flip
        // there keeps its idle syndrome and stays put.
        let fault = PauliError::new(c[j], Pauli::Z, 0);
        let s = post_gate_syndromes(&circuit, &code, fault, LogicalBasis::Dual);
        assert_eq!(s, [idle(j), trivial.clone()]);
        // The physical T byte is the logical control: its flip shows up on both bytes.
        let fault = PauliError::new(t[j], Pauli::Z, 0);
        let s = post_gate_syndromes(&circuit, &code, fault, LogicalBasis::Dual);
        assert_eq!(s, [idle(j), idle(j)]);
        assert!(!idle(j).is_trivial());
        for f in [PauliError::new(c[j], Pauli::Z, 0), PauliError::new(t[j], Pauli::Z, 0)] {
            let o = run_and_recover(&circuit, &table, &input, &reference, &[f], 5).unwrap();
            assert!(o.recovered);
        }
    }
    // On (0,1) labels a control-byte fault never reaches the target.
    for position in 0..=circuit.len() {
        for &q in &c {
            let s = post_gate_syndromes(&circuit, &code, PauliError::new(q, Pauli::Z, position), LogicalBasis::Computational);
            assert!(s[1].is_trivial());
        }
    }
}

#[test]
fn two_faults_on_one_byte_defeat_recovery() {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1a(&code).unwrap();
    let table = RecoveryTable::build(&circuit, &code, &enumerate_fault_points(&circuit, &[Pauli::Z])).unwrap();
    let t = circuit.layout.block("T").unwrap().qubits.clone();
    let pair = [PauliError::new(t[0], Pauli::Z, 0), PauliError::new(t[1], Pauli::Z, 0)];
    let failed = (0..8).any(|seed| {
        let (input, reference) = payload_pair(&circuit, &code, LogicalBasis::Computational, seed).unwrap();
        !run_and_recover(&circuit, &table, &input, &reference, &pair, seed).unwrap().recovered
    });
    assert!(failed);
}

#[test]
fn sweeps_are_reproducible() {
    let code = CodeSpec::seven_bit();
    let circuit = build_cnot_fig1a(&code).unwrap();
    let faults = enumerate_fault_points(&circuit, &[Pauli::Y]);
    let table = RecoveryTable::build(&circuit, &code, &faults).unwrap();
    let a = sweep(&circuit, &table, &faults, LogicalBasis::Computational, 77).unwrap();
    let b = sweep(&circuit, &table, &faults, LogicalBasis::Computational, 77).unwrap();
    assert_eq!(a, b);
    assert!(a.iter().zip(&faults).all(|(o, f)| o.faults == [*f]));
}
