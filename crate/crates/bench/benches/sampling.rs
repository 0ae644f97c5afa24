use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trunsep_bench::magic_chain;
use trunsep_core::scalar::ratio;
use trunsep_core::sim::{build_decomposition_table, estimate, sample_noisy_cz, CompiledCircuit};

fn sampling(c: &mut Criterion) {
    let r = ratio(1, 2);
    let table = build_decomposition_table(&r).unwrap();
    let ext = table.extrema();
    let (va, vb) = (ext[0].clone(), ext[17].clone());
    let lambda = ratio(3, 5);

    let mut group = c.benchmark_group("sampling");
    group.bench_function("noisy cz draw", |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        b.iter(|| sample_noisy_cz(&table, black_box(&va), black_box(&vb), &lambda, &mut rng).unwrap())
    });

    let circuit = magic_chain(&r);
    group.bench_function("compile 3-qubit chain", |b| {
        b.iter_batched(|| circuit.clone(), |c| CompiledCircuit::new(&c, &table).unwrap(), BatchSize::SmallInput)
    });

    let shots = 10_000;
    group.throughput(Throughput::Elements(shots));
    group.sample_size(20);
    group.bench_function("estimate 3-qubit chain", |b| {
        b.iter(|| estimate(black_box(&circuit), &table, shots, 7, Some(1)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sampling);
criterion_main!(benches);
