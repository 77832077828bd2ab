use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dsmimo_bench::{ds_link, fixture_drop, CELLS, USERS};
use dsmimo_core::channel::{ChannelModelSpec, LinkChannel};
use dsmimo_core::detection::{detector_matrix, DetectorKind};
use dsmimo_core::estimation::{lmmse_filter, Operator};
use dsmimo_core::linalg::complex_normal_matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const M: usize = 100;

fn sampler(c: &mut Criterion) {
    let mut group = c.benchmark_group("link_sample");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let models = [
        ("rayleigh".to_string(), ChannelModelSpec::UncorrelatedRayleigh { beta: 1.0 }),
        ("ds_s21".to_string(), ds_link(21, 0.3, 1.0)),
        ("ds_s81".to_string(), ds_link(81, 0.3, 1.0)),
    ];
    for (name, spec) in &models {
        let link = LinkChannel::new(spec, M).unwrap();
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(link.sample(&mut rng)))
        });
    }
    group.finish();
}

fn estimation(c: &mut Criterion) {
    let mut group = c.benchmark_group("lmmse_filter");
    for s in [21, 81] {
        let moments: Vec<Operator> = (0..CELLS)
            .map(|i| Operator::second_moment(&ds_link(s, 0.2 * i as f64, if i == 0 { 1.0 } else { 0.01 }), M).unwrap())
            .collect();
        let refs: Vec<&Operator> = moments.iter().collect();
        let powers = vec![100.0; CELLS];
        group.bench_function(BenchmarkId::new("ds_copilots4", s), |b| {
            b.iter(|| black_box(lmmse_filter(0, &refs, &powers, USERS, 1.0).unwrap()))
        });
    }
    group.finish();
}

fn detection(c: &mut Criterion) {
    let mut group = c.benchmark_group("detector");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = complex_normal_matrix(&mut rng, M, USERS);
    let powers = vec![100.0; USERS];
    for kind in DetectorKind::ALL {
        group.bench_function(BenchmarkId::from_parameter(kind), |b| {
            b.iter(|| black_box(detector_matrix(&h, &powers, kind).unwrap()))
        });
    }
    group.finish();
}

fn one_drop(c: &mut Criterion) {
    let mut group = c.benchmark_group("drop_10_realizations");
    group.sample_size(10);
    for (name, s) in [("rayleigh", None), ("ds_s21", Some(21))] {
        let sim = fixture_drop(M, s).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| {
                black_box(
                    sim.run(&DetectorKind::ALL, 10, |r| ChaCha8Rng::seed_from_u64(r as u64))
                        .unwrap(),
                )
            })
        });
    }
    group.finish();
}

criterion_group!(benches, sampler, estimation, detection, one_drop);
criterion_main!(benches);
