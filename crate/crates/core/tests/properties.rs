use encoded_gates::circuit::Circuit;
use encoded_gates::codes::{decode_logical, encode, CodeSpec};
use encoded_gates::gates::{build, v_gate, GateKind, VVariant};
use encoded_gates::pauli::{Pauli, PauliString};
use encoded_gates::statevec::{GateMatrix, StateVector};
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

const N: usize = 5;

fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn state(n: usize) -> impl Strategy<Value = StateVector> {
    prop::collection::vec(complex(), 1 << n).prop_filter_map("nonzero", move |mut amps| {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(n, amps).ok()
    })
}

/// Gram-Schmidt on random columns gives a random unitary.
fn unitary(arity: usize) -> impl Strategy<Value = GateMatrix> {
    let dim = 1usize << arity;
    prop::collection::vec(complex(), dim * dim).prop_filter_map("full rank", move |raw| {
        let mut cols: Vec<Vec<Complex64>> = Vec::new();
        for c in 0..dim {
            let mut v: Vec<Complex64> = (0..dim).map(|r| raw[r * dim + c]).collect();
            for u in &cols {
                let dot: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= dot * y);
            }
            let norm = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-3 {
                return None;
            }
            v.iter_mut().for_each(|x| *x /= norm);
            cols.push(v);
        }
        let mut entries = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (c, col) in cols.iter().enumerate() {
            for (r, &x) in col.iter().enumerate() {
                entries[r * dim + c] = x;
            }
        }
        GateMatrix::new("U", arity, entries).ok()
    })
}

/// Distinct qubits: `k` targets followed by up to two controls.
fn placement(k: usize) -> impl Strategy<Value = (Vec<usize>, Vec<usize>)> {
    (Just((0..N).collect::<Vec<_>>()).prop_shuffle(), 0..=2usize).prop_map(move |(perm, nc)| {
        (perm[..k].to_vec(), perm[k..k + nc].to_vec())
    })
}

/// The whole-register matrix written out entry by entry, applied by a plain
/// matrix-vector product.
fn naive_apply(state: &StateVector, gate: &GateMatrix, controls: &[usize], targets: &[usize]) -> Vec<Complex64> {
    let k = targets.len();
    let sub = |i: usize| -> usize {
        targets
            .iter()
            .enumerate()
            .map(|(b, &t)| (i >> t & 1) << (k - 1 - b))
            .sum()
    };
    let tmask: usize = targets.iter().map(|&t| 1 << t).sum();
    let cmask: usize = controls.iter().map(|&c| 1 << c).sum();
    let dim = state.dim();
    (0..dim)
        .map(|r| {
            (0..dim)
                .map(|c| {
                    let m = if r & !tmask != c & !tmask {
                        Complex64::new(0.0, 0.0)
                    } else if c & cmask == cmask {
                        gate.entry(sub(r), sub(c))
                    } else if r == c {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    };
                    m * state.amplitude(c)
                })
                .sum()
        })
        .collect()
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_qubit_kernels_match_the_dense_oracle(s in state(N), g in unitary(1), (t, c) in placement(1)) {
        let mut fast = s.clone();
        fast.apply_controlled(&g, &c, &t).unwrap();
        prop_assert!(max_diff(fast.amplitudes(), &naive_apply(&s, &g, &c, &t)) < 1e-12);
    }

    #[test]
    fn two_qubit_kernels_match_the_dense_oracle(s in state(N), g in unitary(2), (t, c) in placement(2)) {
        let mut fast = s.clone();
        fast.apply_controlled(&g, &c, &t).unwrap();
        prop_assert!(max_diff(fast.amplitudes(), &naive_apply(&s, &g, &c, &t)) < 1e-12);
    }

    #[test]
    fn gates_preserve_the_norm(s in state(N), gates in prop::collection::vec((unitary(1), placement(1)), 1..12)) {
        let mut s = s;
        for (g, (t, c)) in &gates {
            s.apply_controlled(g, c, t).unwrap();
        }
        prop_assert!((s.norm_sqr() - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn paulis_are_involutions(s in state(N), q in 0..N, z in any::<bool>()) {
        let g = if z { GateMatrix::z() } else { GateMatrix::x() };
        let mut twice = s.clone();
        twice.apply_unitary(&g, &[q]).unwrap();
        twice.apply_unitary(&g, &[q]).unwrap();
        prop_assert!(twice.max_abs_diff(&s) <= 1e-12);
    }

    #[test]
    fn disjoint_gates_commute(s in state(N), a in unitary(1), b in unitary(2), perm in Just((0..N).collect::<Vec<_>>()).prop_shuffle()) {
        let (qa, qb) = (&perm[..1], &perm[1..3]);
        let mut ab = s.clone();
        ab.apply_unitary(&a, qa).unwrap();
        ab.apply_unitary(&b, qb).unwrap();
        let mut ba = s.clone();
        ba.apply_unitary(&b, qb).unwrap();
        ba.apply_unitary(&a, qa).unwrap();
        prop_assert!(ab.max_abs_diff(&ba) <= 1e-12);
    }

    #[test]
    fn controlled_gates_skip_unset_controls(s in state(N), g in unitary(1), (t, c) in placement(1)) {
        prop_assume!(!c.is_empty());
        let mut out = s.clone();
        out.apply_controlled(&g, &c, &t).unwrap();
        let cmask: usize = c.iter().map(|&q| 1 << q).sum();
        for i in (0..s.dim()).filter(|i| i & cmask != cmask) {
            prop_assert_eq!(out.amplitude(i), s.amplitude(i));
        }
    }

    #[test]
    fn eigenstate_measurement_is_deterministic(a in complex(), b in complex(), seed in any::<u64>(), k in 0..6usize) {
        prop_assume!(a.norm() + b.norm() > 1e-3);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let code = CodeSpec::seven_bit();
        let s = encode(&code, a / norm, b / norm).unwrap();
        let m = s.measure_pauli(&code.stabilizers[k], seed).unwrap();
        prop_assert_eq!(m.eigenvalue, 1);
        prop_assert!(m.state.max_abs_diff(&s) <= 1e-12);
    }

    #[test]
    fn logical_x_swaps_amplitudes(a in complex(), b in complex(), seven in any::<bool>()) {
        prop_assume!(a.norm() + b.norm() > 1e-3);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (a, b) = (a / norm, b / norm);
        let code = if seven { CodeSpec::seven_bit() } else { CodeSpec::three_bit() };
        let mut s = encode(&code, a, b).unwrap();
        let back = decode_logical(&code, &s).unwrap();
        prop_assert!((back.alpha - a).norm() < 1e-12 && (back.beta - b).norm() < 1e-12);
        s.apply_pauli(&code.logical_x.on_register()).unwrap();
        let flipped = decode_logical(&code, &s).unwrap();
        prop_assert!((flipped.alpha - b).norm() < 1e-12 && (flipped.beta - a).norm() < 1e-12);
    }

    #[test]
    fn single_errors_are_corrected(a in complex(), b in complex(), pos in 0..7usize, kind in 0..3usize, seed in any::<u64>()) {
        prop_assume!(a.norm() + b.norm() > 1e-3);
        let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let code = CodeSpec::seven_bit();
        let clean = encode(&code, a / norm, b / norm).unwrap();
        let mut s = clean.clone();
        s.apply_pauli(&PauliString::single(7, pos, Pauli::NONTRIVIAL[kind]).on_register()).unwrap();
        let fixed = encoded_gates::codes::correct_memory(&code, &s, seed).unwrap();
        prop_assert!(fixed.fidelity(&clean).unwrap() >= 1.0 - 1e-10);
    }
}

#[test]
fn circuit_dumps_parse_back() {
    for kind in GateKind::ALL {
        let code = CodeSpec::new(kind.default_code());
        let circuit = build(kind, &code, &v_gate(VVariant::Paper)).unwrap();
        let text = circuit.dump();
        let mut back = Circuit::parse_dump(&text).unwrap();
        back.steps = circuit.steps.clone();
        // Positions with no legal block are not written out.
        let mut expected = circuit.clone();
        expected.checkpoints.retain(|c| !c.blocks.is_empty());
        assert_eq!(back, expected, "{kind}");
        assert_eq!(back.dump(), text);
    }
}

/// Per-index form of the same product, cheap enough for registers past the
/// kernels' parallel threshold.
fn sparse_apply(state: &StateVector, gate: &GateMatrix, controls: &[usize], targets: &[usize]) -> Vec<Complex64> {
    let k = targets.len();
    let cmask: usize = controls.iter().map(|&c| 1 << c).sum();
    let with_sub = |i: usize, s: usize| {
        targets.iter().enumerate().fold(i, |acc, (b, &t)| {
            let bit = s >> (k - 1 - b) & 1;
            (acc & !(1 << t)) | (bit << t)
        })
    };
    let sub = |i: usize| -> usize { targets.iter().enumerate().map(|(b, &t)| (i >> t & 1) << (k - 1 - b)).sum() };
    (0..state.dim())
        .map(|i| {
            if i & cmask != cmask {
                return state.amplitude(i);
            }
            (0..1usize << k).map(|s| gate.entry(sub(i), s) * state.amplitude(with_sub(i, s))).sum()
        })
        .collect()
}

#[test]
fn parallel_kernel_paths_match_the_sparse_oracle() {
    let n = 15;
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let s = state(n).new_tree(&mut runner).unwrap().current();
    let g1 = unitary(1).new_tree(&mut runner).unwrap().current();
    let g2 = unitary(2).new_tree(&mut runner).unwrap().current();
    let cases: [(&GateMatrix, Vec<usize>, Vec<usize>); 6] = [
        (&g1, vec![], vec![0]),
        (&g1, vec![3], vec![14]),
        (&g1, vec![14, 2], vec![9]),
        (&GateMatrix::x(), vec![1], vec![13]),
        (&g2, vec![], vec![14, 0]),
        (&g2, vec![5], vec![2, 11]),
    ];
    for (g, controls, targets) in cases {
        let mut fast = s.clone();
        fast.apply_controlled(g, &controls, &targets).unwrap();
        let expected = sparse_apply(&s, g, &controls, &targets);
        assert!(max_diff(fast.amplitudes(), &expected) < 1e-12, "{controls:?} {targets:?}");
    }
}
