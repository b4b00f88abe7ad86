use criterion::{criterion_group, criterion_main, Criterion};
use encoded_gates::codes::CodeSpec;
use encoded_gates::gates::{build_cnot_fig1a, build_toffoli_7bit, build_toffoli_fig3a, v_gate, VVariant};
use encoded_gates::logical::{logical_action_matrix, LogicalBasis};
use encoded_gates::pauli::Pauli;
use encoded_gates::recovery::{enumerate_fault_points, enumerate_faults, FaultScope, RecoveryTable};

fn logical_actions(c: &mut Criterion) {
    let three = CodeSpec::three_bit();
    let seven = CodeSpec::seven_bit();
    let v = v_gate(VVariant::Exact);
    let mut group = c.benchmark_group("logical_action");
    let fig2 = build_cnot_fig1a(&seven).unwrap();
    group.bench_function("fig2", |b| {
        b.iter(|| logical_action_matrix(&fig2, &seven, LogicalBasis::Computational).unwrap())
    });
    let fig3a = build_toffoli_fig3a(&three, &v).unwrap();
    group.bench_function("fig3a", |b| {
        b.iter(|| logical_action_matrix(&fig3a, &three, LogicalBasis::Computational).unwrap())
    });
    group.sample_size(10);
    let toffoli7 = build_toffoli_7bit(&seven, &v).unwrap();
    group.bench_function("toffoli7", |b| {
        b.iter(|| logical_action_matrix(&toffoli7, &seven, LogicalBasis::Computational).unwrap())
    });
    group.finish();
}

fn recovery_tables(c: &mut Criterion) {
    let three = CodeSpec::three_bit();
    let seven = CodeSpec::seven_bit();
    let mut group = c.benchmark_group("recovery_table");
    group.sample_size(10);
    let fig2 = build_cnot_fig1a(&seven).unwrap();
    let faults = enumerate_fault_points(&fig2, &Pauli::NONTRIVIAL);
    group.bench_function("fig2_xyz_all", |b| b.iter(|| RecoveryTable::build(&fig2, &seven, &faults).unwrap()));
    let fig3a = build_toffoli_fig3a(&three, &v_gate(VVariant::Exact)).unwrap();
    let faults = enumerate_faults(&fig3a, &[Pauli::Z], &FaultScope::blocks(&["CI", "CII"]));
    group.bench_function("fig3a_z_controls", |b| {
        b.iter(|| RecoveryTable::build(&fig3a, &three, &faults).unwrap())
    });
    group.finish();
}

criterion_group!(benches, logical_actions, recovery_tables);
criterion_main!(benches);
