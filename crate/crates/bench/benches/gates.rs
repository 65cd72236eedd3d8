use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ifm_core::gates::{finite_ifm, hadamard, ideal_ifm};
use ifm_core::{ModeDescriptor, ModeId, OccupationConfig, QuantumState, Species};
use std::hint::black_box;

fn ifm_register() -> QuantumState {
    QuantumState::new_register(
        vec![
            ModeDescriptor::new(0, Species::Object, "x"),
            ModeDescriptor::new(1, Species::Photon, "a"),
            ModeDescriptor::new(2, Species::Photon, "b"),
        ],
        &OccupationConfig::new(&[1, 0, 1]).unwrap(),
    )
    .unwrap()
}

fn ifm(c: &mut Criterion) {
    let base = ifm_register();
    c.bench_function("ideal_ifm", |b| {
        b.iter(|| {
            let mut s = base.clone();
            ideal_ifm(&mut s, ModeId(0), ModeId(1), ModeId(2)).unwrap();
            black_box(s)
        })
    });
    let mut group = c.benchmark_group("finite_ifm");
    for n in [10u32, 100, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| {
                let mut s = base.clone();
                finite_ifm(&mut s, ModeId(0), ModeId(1), ModeId(2), n).unwrap();
                black_box(s)
            })
        });
    }
    group.finish();
}

fn hadamard_layer(c: &mut Criterion) {
    let mut base = QuantumState::vacuum();
    let qubits: Vec<_> = (0..8)
        .map(|i| base.add_qubit(Species::Electron, "q", i % 2 == 0).unwrap())
        .collect();
    c.bench_function("hadamard_8_qubits", |b| {
        b.iter(|| {
            let mut s = base.clone();
            for q in &qubits {
                hadamard(&mut s, *q).unwrap();
            }
            black_box(s.term_count())
        })
    });
}

criterion_group!(benches, ifm, hadamard_layer);
criterion_main!(benches);
