//! Compares the data-parallel core against the sequential fallback.
//!
//! The execution mode is a compile-time feature: run
//!
//! ```text
//! cargo bench --bench parallel_vs_serial                         # rayon
//! cargo bench --bench parallel_vs_serial --no-default-features   # serial
//! ```
//!
//! and compare the `parallel/...` and `serial/...` benchmark IDs.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use sptl::c64;
use sptl::density::{fejer_pair, pairing_quadrature, trapezoid_pair, MomentSpec, SymmetryType};
use sptl::zagier::geom_side;

const MODE: &str = if cfg!(feature = "parallel") { "parallel" } else { "serial" };

fn bench_geom_side(c: &mut Criterion) {
    c.bench_function(&format!("{MODE}/geom_side_k26_m4"), |b| {
        b.iter(|| geom_side(black_box(26), black_box(4), c64(2.0, 0.5), 1e-9).unwrap())
    });
}

fn bench_pairing_quadrature(c: &mut Criterion) {
    let f = fejer_pair(0.9).unwrap();
    c.bench_function(&format!("{MODE}/pairing_quadrature_O"), |b| {
        b.iter(|| pairing_quadrature(SymmetryType::O, black_box(&f), 1e-8).unwrap())
    });
}

fn bench_explicit_formula_model(c: &mut Criterion) {
    let f = trapezoid_pair(0.3825, 0.45).unwrap();
    let spec = MomentSpec::new(0.5, 1e8, 2).unwrap();
    c.bench_function(&format!("{MODE}/explicit_formula_model_r2"), |b| {
        b.iter(|| sptl::density::explicit_formula_model(black_box(&spec), black_box(&f)).unwrap())
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_geom_side, bench_pairing_quadrature, bench_explicit_formula_model
}
criterion_main!(benches);
