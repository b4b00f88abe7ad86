use std::collections::BTreeMap;

use encoded_gates::circuit::{Circuit, Op};
use encoded_gates::codes::CodeSpec;
use encoded_gates::gates::{
    build_cnot_fig1a, build_cnot_fig1b, build_cnot_fig1c, build_toffoli_7bit, build_toffoli_fig3a,
    build_toffoli_fig3a_with, build_toffoli_fig3b, v_gate, QubyteControl, VVariant,
};
use encoded_gates::logical::{
    cnot_matrix, compare_up_to_phase, control_block_phases, decode_register, encode_label, encode_register,
    logical_action_matrix, phase_label, random_coefficients, toffoli_matrix, ComplexMatrix, LogicalBasis,
};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Logical action of a cnot-only circuit computed without the simulator:
/// push every codeword bitstring through the cnots classically and match the
/// resulting word sets against the encoded label states.
fn classical_cnot_action(circuit: &Circuit, code: &CodeSpec) -> ComplexMatrix {
    let permute = |mut index: usize| {
        for op in &circuit.ops {
            let Op::Controlled { controls, targets, .. } = op else {
                panic!("only cnots expected");
            };
            if index >> controls[0] & 1 == 1 {
                index ^= 1 << targets[0];
            }
        }
        index
    };
    let support = |label: usize| -> BTreeMap<usize, i64> {
        let s = encode_label(code, &circuit.layout, LogicalBasis::Computational, label).unwrap();
        s.amplitudes()
            .iter()
            .enumerate()
            .filter(|(_, a)| a.norm() > 1e-12)
            .map(|(i, a)| (i, (a.re * 1e6).round() as i64))
            .collect()
    };
    let dim = 1usize << circuit.layout.num_blocks();
    let mut m = ComplexMatrix::zeros(dim);
    for j in 0..dim {
        let moved: BTreeMap<usize, i64> = support(j).into_iter().map(|(i, a)| (permute(i), a)).collect();
        let k = (0..dim).find(|&k| support(k) == moved).expect("cnots map codewords to codewords");
        m.set(k, j, c(1.0));
    }
    m
}

#[test]
fn cnot_constructions_match_the_permutation_oracle() {
    let three = CodeSpec::three_bit();
    let seven = CodeSpec::seven_bit();
    let cases = [
        (build_cnot_fig1a(&three).unwrap(), &three),
        (build_cnot_fig1b(&three).unwrap(), &three),
        (build_cnot_fig1a(&seven).unwrap(), &seven),
    ];
    for (circuit, code) in cases {
        let oracle = classical_cnot_action(&circuit, code);
        assert!(oracle.max_abs_diff(&cnot_matrix()) < 1e-15, "{}", circuit.name);
        let action = logical_action_matrix(&circuit, code, LogicalBasis::Computational).unwrap();
        assert!(action.matrix.max_abs_diff(&oracle) < TOL, "{}", circuit.name);
        assert!(action.max_leakage() <= TOL);
    }
}

#[test]
fn fig1c_matches_fig1a_on_the_code_space() {
    let code = CodeSpec::three_bit();
    let a = logical_action_matrix(&build_cnot_fig1a(&code).unwrap(), &code, LogicalBasis::Computational).unwrap();
    let b = logical_action_matrix(&build_cnot_fig1b(&code).unwrap(), &code, LogicalBasis::Computational).unwrap();
    let c1c = logical_action_matrix(&build_cnot_fig1c(&code).unwrap(), &code, LogicalBasis::Computational).unwrap();
    assert!(a.matrix.max_abs_diff(&b.matrix) < TOL);
    assert!(a.matrix.max_abs_diff(&c1c.matrix) < TOL);
    assert!(c1c.max_leakage() <= TOL);
}

#[test]
fn fig1a_superposition_follows_the_control() {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1a(&code).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let ab = random_coefficients(2, &mut rng);
        let q = random_coefficients(2, &mut rng);
        let (alpha, beta, a, b) = (ab[0], ab[1], q[0], q[1]);
        let product = [alpha * a, alpha * b, beta * a, beta * b];
        let mut state = encode_register(&code, &circuit.layout, LogicalBasis::Computational, &product).unwrap();
        circuit.run(&mut state).unwrap();
        // Control |1_L> swaps the target amplitudes: |-Q> = a|1_L> + b|0_L>.
        let expected = [alpha * a, alpha * b, beta * b, beta * a];
        let reference = encode_register(&code, &circuit.layout, LogicalBasis::Computational, &expected).unwrap();
        assert!(state.fidelity(&reference).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn fig1a_examples() {
    let three = CodeSpec::three_bit();
    let circuit = build_cnot_fig1a(&three).unwrap();
    let mut s = encode_label(&three, &circuit.layout, LogicalBasis::Computational, 0b10).unwrap();
    circuit.run(&mut s).unwrap();
    let expected = encode_label(&three, &circuit.layout, LogicalBasis::Computational, 0b11).unwrap();
    assert!(s.fidelity(&expected).unwrap() >= 1.0 - TOL);

    let seven = CodeSpec::seven_bit();
    let fig2 = build_cnot_fig1a(&seven).unwrap();
    let mut s = encode_label(&seven, &fig2.layout, LogicalBasis::Computational, 0b11).unwrap();
    fig2.run(&mut s).unwrap();
    let expected = encode_label(&seven, &fig2.layout, LogicalBasis::Computational, 0b10).unwrap();
    assert!(s.fidelity(&expected).unwrap() >= 1.0 - TOL);
}

#[test]
fn fig1b_examples() {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1b(&code).unwrap();
    for (input, output) in [(0b10, 0b11), (0b01, 0b01)] {
        let mut s = encode_label(&code, &circuit.layout, LogicalBasis::Computational, input).unwrap();
        circuit.run(&mut s).unwrap();
        let expected = encode_label(&code, &circuit.layout, LogicalBasis::Computational, output).unwrap();
        assert!(s.fidelity(&expected).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn transversal_cnot_reverses_on_dual_labels() {
    // On (+,-) labels the physical target byte acts as the control: the
    // physical control's label flips when the physical target holds |-_L>.
    let reversed = ComplexMatrix::permutation(4, |j| if j & 1 == 1 { j ^ 0b10 } else { j });
    for code in [CodeSpec::three_bit(), CodeSpec::seven_bit()] {
        let circuit = build_cnot_fig1a(&code).unwrap();
        let action = logical_action_matrix(&circuit, &code, LogicalBasis::Dual).unwrap();
        assert!(action.matrix.max_abs_diff(&reversed) < TOL, "{}", circuit.name);
    }
}

#[test]
fn fig3a_reproduces_toffoli() {
    let code = CodeSpec::three_bit();
    for mode in [QubyteControl::ParityGate, QubyteControl::Fold] {
        let circuit = build_toffoli_fig3a_with(&code, &v_gate(VVariant::Exact), mode).unwrap();
        let action = logical_action_matrix(&circuit, &code, LogicalBasis::Computational).unwrap();
        assert!(action.matrix.max_abs_diff(&toffoli_matrix()) < TOL, "{mode:?}");
    }
}

#[test]
fn paper_v_leaves_phase_i_on_the_both_set_block() {
    let code = CodeSpec::three_bit();
    let circuit = build_toffoli_fig3a(&code, &v_gate(VVariant::Paper)).unwrap();
    let action = logical_action_matrix(&circuit, &code, LogicalBasis::Computational).unwrap();
    let ideal = toffoli_matrix();
    assert!(!compare_up_to_phase(&action.matrix, &ideal).matches(1e-3));
    let labels: Vec<String> = control_block_phases(&action.matrix, &ideal, 1)
        .into_iter()
        .map(phase_label)
        .collect();
    assert_eq!(labels, ["1", "1", "1", "i"]);
    // Everything except the (1,1) block still agrees exactly.
    for r in 0..6 {
        for k in 0..6 {
            assert!((action.matrix.entry(r, k) - ideal.entry(r, k)).norm() < TOL);
        }
    }
}

#[test]
fn fig3a_table_rows() {
    let code = CodeSpec::three_bit();
    let circuit = build_toffoli_fig3a(&code, &v_gate(VVariant::Exact)).unwrap();
    for (input, output) in [(0b110, 0b111), (0b100, 0b100), (0b101, 0b101), (0b011, 0b011)] {
        let mut s = encode_label(&code, &circuit.layout, LogicalBasis::Computational, input).unwrap();
        circuit.run(&mut s).unwrap();
        let expected = encode_label(&code, &circuit.layout, LogicalBasis::Computational, output).unwrap();
        assert!(s.fidelity(&expected).unwrap() >= 1.0 - TOL);
    }
}

#[test]
fn fig3a_restores_the_second_control() {
    let code = CodeSpec::three_bit();
    let circuit = build_toffoli_fig3a(&code, &v_gate(VVariant::Exact)).unwrap();
    let cii = circuit.layout.block("CII").unwrap().qubits.clone();
    let through_step4 = circuit.step_range("4: restore CII").unwrap().end;
    for label in 0..8 {
        let input = encode_label(&code, &circuit.layout, LogicalBasis::Computational, label).unwrap();
        let mut s = input.clone();
        circuit.run_range(&mut s, 0..through_step4).unwrap();
        let before = input.reduced_density_matrix(&cii).unwrap();
        let after = s.reduced_density_matrix(&cii).unwrap();
        for r in 0..before.dim() {
            for k in 0..before.dim() {
                assert!((before.entry(r, k) - after.entry(r, k)).norm() < TOL);
            }
        }
    }
}

#[test]
fn fig3b_is_toffoli_on_dual_labels() {
    let code = CodeSpec::three_bit();
    let circuit = build_toffoli_fig3b(&code, &v_gate(VVariant::Exact)).unwrap();
    let action = logical_action_matrix(&circuit, &code, LogicalBasis::Dual).unwrap();
    assert!(action.matrix.max_abs_diff(&toffoli_matrix()) < TOL);

    // (-, -, +) -> (-, -, -)
    let mut s = encode_label(&code, &circuit.layout, LogicalBasis::Dual, 0b110).unwrap();
    circuit.run(&mut s).unwrap();
    let (coeffs, leakage) = decode_register(&code, &circuit.layout, LogicalBasis::Dual, &s).unwrap();
    assert!(leakage < TOL);
    assert!((coeffs[0b111].norm() - 1.0).abs() < TOL);
}

#[test]
fn toffoli7_flips_on_both_controls() {
    let code = CodeSpec::seven_bit();
    let circuit = build_toffoli_7bit(&code, &v_gate(VVariant::Exact)).unwrap();
    assert_eq!(circuit.layout.total_qubits(), 21);
    let mut s = encode_label(&code, &circuit.layout, LogicalBasis::Computational, 0b110).unwrap();
    circuit.run(&mut s).unwrap();
    let (coeffs, leakage) = decode_register(&code, &circuit.layout, LogicalBasis::Computational, &s).unwrap();
    assert!(leakage < TOL);
    assert!((coeffs[0b111].norm() - 1.0).abs() < TOL);
}

#[test]
fn fig1c_ancilla_is_left_clean() {
    let code = CodeSpec::three_bit();
    let circuit = build_cnot_fig1c(&code).unwrap();
    let anc = circuit.layout.ancillas()[0];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let coeffs = random_coefficients(4, &mut rng);
        let mut s = encode_register(&code, &circuit.layout, LogicalBasis::Computational, &coeffs).unwrap();
        circuit.run(&mut s).unwrap();
        let rho = s.reduced_density_matrix(&[anc]).unwrap();
        assert!((rho.purity() - 1.0).abs() < TOL);
        assert!((rho.entry(0, 0).re - 1.0).abs() < TOL);
    }
}
