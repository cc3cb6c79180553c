use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use eitcool_bench::{fixture, probe_grid};
use eitcool_core::spectroscopy::rabi_model;
use eitcool_core::{
    absorption_spectrum, build_liouvillian, evolve, fit_rabi, phonon_limit, solve_steady_state, transverse_modes,
    units, DensityMatrix, TrapConfig,
};

fn steady_state(c: &mut Criterion) {
    let p = fixture();
    let l = build_liouvillian(&p).unwrap();
    c.bench_function("build_liouvillian", |b| b.iter(|| build_liouvillian(black_box(&p)).unwrap()));
    c.bench_function("solve_steady_state", |b| b.iter(|| solve_steady_state(black_box(&l)).unwrap()));
    c.bench_function("evolve_t1e4", |b| {
        b.iter(|| evolve(&DensityMatrix::maximally_mixed(), black_box(&l), 1e4, l.default_step()).unwrap())
    });
}

fn spectra(c: &mut Criterion) {
    let p = fixture();
    let grid = probe_grid(&p, 201);
    c.bench_function("absorption_spectrum_201", |b| b.iter(|| absorption_spectrum(black_box(&p), &grid).unwrap()));
    c.bench_function("phonon_limit", |b| b.iter(|| phonon_limit(black_box(&p), 0.22).unwrap()));
}

fn chain_and_fits(c: &mut Criterion) {
    let cfg = TrapConfig { n_ions: 20, omega_ax: units::mhz_to_angular(0.3), ..Default::default() };
    c.bench_function("transverse_modes_20", |b| b.iter(|| transverse_modes(black_box(&cfg)).unwrap()));
    let t: Vec<f64> = (0..100).map(|k| 0.2 * k as f64).collect();
    let y: Vec<f64> = t.iter().map(|&t| rabi_model(0.004, 0.8, 0.01, t)).collect();
    c.bench_function("fit_rabi_100", |b| b.iter(|| fit_rabi(black_box(&t), &y, None).unwrap()));
}

criterion_group!(benches, steady_state, spectra, chain_and_fits);
criterion_main!(benches);
