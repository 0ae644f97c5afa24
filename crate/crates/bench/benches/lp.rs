use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, Criterion};
use trunsep_core::lp::{is_separable, min_noise_case};
use trunsep_core::pauli::apply_noisy_cz;
use trunsep_core::scalar::ratio;
use trunsep_core::threshold::pauli_witness_bound;
use trunsep_core::{Case, TruncatedCube};

fn min_noise(c: &mut Criterion) {
    let cube = TruncatedCube::new(ratio(1, 2)).unwrap();
    let mut group = c.benchmark_group("min_noise r=1/2");
    group.sample_size(10).measurement_time(Duration::from_secs(30));
    for case in Case::ALL {
        group.bench_function(format!("case {case}"), |b| b.iter(|| min_noise_case(black_box(case), &cube).unwrap()));
    }
    group.finish();
}

fn membership(c: &mut Criterion) {
    let r = ratio(1, 2);
    let cube = TruncatedCube::new(r.clone()).unwrap();
    let op = apply_noisy_cz(&Case::Two.input_operator(&r), &ratio(3, 5)).unwrap();
    let mut group = c.benchmark_group("separability");
    group.sample_size(10);
    group.bench_function("is_separable case 2 at 3/5", |b| b.iter(|| is_separable(black_box(&op), &cube).unwrap()));
    group.bench_function("pauli witness case 1", |b| b.iter(|| pauli_witness_bound(black_box(Case::One), &cube)));
    group.finish();
}

criterion_group!(benches, min_noise, membership);
criterion_main!(benches);
