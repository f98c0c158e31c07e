use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tra_bench::{continuous_families, coulomb, poschl_teller, racah};
use tra_core::asymptotics::{fit_scattering, FitWindow};
use tra_core::physics::{eigen_oracle_spectrum, hamiltonian_matrix, MatrixOptions};
use tra_core::polyfam::{poly_eval_closed, poly_sequence};
use tra_core::spectra::gauss_rule;

fn recursion(c: &mut Criterion) {
    let mut g = c.benchmark_group("recursion");
    for p in continuous_families() {
        g.bench_with_input(BenchmarkId::new("sequence_1000", p.name()), &p, |b, p| {
            b.iter(|| poly_sequence(p, 1000, black_box(0.8)).unwrap())
        });
    }
    let p = racah();
    g.bench_function("racah_node_sequence", |b| b.iter(|| poly_sequence(&p, 20, black_box(7.0)).unwrap()));
    g.bench_function("racah_closed_form", |b| b.iter(|| poly_eval_closed(&p, 10, black_box(7.0)).unwrap()));
    g.finish();
}

fn gauss(c: &mut Criterion) {
    let mut g = c.benchmark_group("gauss_rule");
    for p in continuous_families() {
        for m in [20, 80] {
            g.bench_with_input(BenchmarkId::new(p.name(), m), &m, |b, &m| b.iter(|| gauss_rule(&p, m).unwrap()));
        }
    }
    g.finish();
}

fn assembly(c: &mut Criterion) {
    let mut g = c.benchmark_group("assembly");
    g.sample_size(20);
    for (label, (model, route)) in [("coulomb", coulomb()), ("poschl_teller", poschl_teller())] {
        g.bench_function(BenchmarkId::new(label, 40), |b| {
            b.iter(|| hamiltonian_matrix(&model, Some(route), 40, None, MatrixOptions::default()).unwrap())
        });
    }
    let (model, route) = coulomb();
    g.bench_function("coulomb_oracle_M60", |b| {
        b.iter(|| eigen_oracle_spectrum(&model, route, 60, 4, MatrixOptions::default()).unwrap())
    });
    g.finish();
}

fn fit(c: &mut Criterion) {
    let mut g = c.benchmark_group("large_n_fit");
    g.sample_size(20);
    let window = FitWindow::default();
    for p in continuous_families() {
        g.bench_with_input(BenchmarkId::from_parameter(p.name()), &p, |b, p| {
            b.iter(|| fit_scattering(p, black_box(1.0), &window).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, recursion, gauss, assembly, fit);
criterion_main!(benches);
