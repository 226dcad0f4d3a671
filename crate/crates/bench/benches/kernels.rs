use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use cqed_bench::operating_pump;
use cqed_core::floquet::{one_period_propagator, PeriodicHamiltonian, Scheme};
use cqed_core::model::lab_hamiltonian;
use cqed_core::parametric::chi_parametric_series;
use cqed_core::spectra::{chi_from_diagonalization, diagonalize};
use cqed_core::units::mhz;
use cqed_core::{RotatingFrame, SystemSpec};

fn eigensolver(c: &mut Criterion) {
    let sys = SystemSpec::paper_defaults();
    let mut group = c.benchmark_group("diagonalize");
    for qubit_dim in [3, 5, 7] {
        let rf = RotatingFrame::from_system(&sys, &operating_pump(&sys, -50.0, 0.005))
            .unwrap()
            .with_dims(qubit_dim, 4);
        let h = rf.hamiltonian().unwrap();
        group.bench_with_input(BenchmarkId::new("rotating_frame", h.nrows()), &h, |b, h| {
            b.iter(|| diagonalize(black_box(h)).unwrap())
        });
    }
    let lab = lab_hamiltonian(&sys, sys.static_flux).unwrap();
    group.bench_function(BenchmarkId::new("lab", lab.nrows()), |b| {
        b.iter(|| diagonalize(black_box(&lab)).unwrap())
    });
    group.finish();
}

fn shifts(c: &mut Criterion) {
    let sys = SystemSpec::paper_defaults();
    let pump = operating_pump(&sys, -50.0, 0.005);
    c.bench_function("chi_parametric_series", |b| {
        b.iter(|| chi_parametric_series(black_box(mhz(5.0)), black_box(mhz(-50.0)), mhz(-220.0), 3))
    });
    c.bench_function("chi_from_diagonalization", |b| {
        b.iter(|| chi_from_diagonalization(black_box(&sys), black_box(&pump)).unwrap())
    });
}

fn propagator(c: &mut Criterion) {
    let sys = SystemSpec::paper_defaults();
    let p = PeriodicHamiltonian::new(&sys, &operating_pump(&sys, -50.0, 0.005)).unwrap();
    let mut group = c.benchmark_group("one_period_propagator");
    group.sample_size(10);
    for (name, scheme) in [("midpoint", Scheme::Midpoint), ("cf4", Scheme::CommutatorFree4)] {
        group.bench_function(name, |b| b.iter(|| one_period_propagator(black_box(&p), 1024, scheme).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, eigensolver, shifts, propagator);
criterion_main!(benches);
