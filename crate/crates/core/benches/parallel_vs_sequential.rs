use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use expanderlab::charsum;
use expanderlab::expansion;
use expanderlab::par::{self, ExecMode};
use expanderlab::regularity::{self, DefinableGraph, GraphKind};
use expanderlab::{PrimeField, RatPoly};
use std::hint::black_box;

const MODES: [(&str, ExecMode); 2] = [("sequential", ExecMode::Sequential), ("parallel", ExecMode::Parallel)];

fn shkredov() -> RatPoly {
    RatPoly::from_int_terms(2, &[(&[2, 0], 1), (&[1, 1], 1)])
}

fn image(c: &mut Criterion) {
    let f = PrimeField::new(1009).unwrap();
    let a: Vec<u64> = (0..1009).collect();
    let p = shkredov();
    let mut g = c.benchmark_group("image_set");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, 1009), |b| {
            par::set_mode(mode);
            b.iter(|| expansion::image_set(&p, black_box(&a), &a, &f).unwrap())
        });
    }
    g.finish();
}

fn quadruples(c: &mut Criterion) {
    let f = PrimeField::new(17).unwrap();
    let p = shkredov();
    let mut g = c.benchmark_group("quadruple_count");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, 17), |b| {
            par::set_mode(mode);
            b.iter(|| expansion::quadruple_count(&p, &f, expansion::DEFAULT_QUADRUPLE_BUDGET, 0).unwrap())
        });
    }
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let f = PrimeField::new(401).unwrap();
    let graph = DefinableGraph::new(GraphKind::QrDifference, &f).unwrap();
    let partition = regularity::qr_partition(&f);
    let mut g = c.benchmark_group("spectral_discrepancy");
    g.sample_size(10);
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(name, 401), |b| {
            par::set_mode(mode);
            b.iter(|| regularity::spectral_discrepancy(&graph, &partition).unwrap())
        });
    }
    g.finish();
}

fn sums(c: &mut Criterion) {
    let f = PrimeField::new(10_007).unwrap();
    let cubic = RatPoly::from_int_terms(1, &[(&[3], 1), (&[1], 2), (&[0], 5)]);
    let mut g = c.benchmark_group("character_sums");
    for (name, mode) in MODES {
        g.bench_function(BenchmarkId::new(format!("gauss/{name}"), 10_007), |b| {
            par::set_mode(mode);
            b.iter(|| charsum::gauss_sum(black_box(&f)))
        });
        g.bench_function(BenchmarkId::new(format!("additive/{name}"), 10_007), |b| {
            par::set_mode(mode);
            b.iter(|| charsum::additive_char_sum(black_box(&cubic), &f).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, image, quadruples, spectral, sums);
criterion_main!(benches);
