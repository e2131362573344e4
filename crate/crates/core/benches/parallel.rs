use std::hint::black_box;

use betti_core::{compute_betti_matching, DimSet, Options, VoxelGrid};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn volume(n: usize, seed: u64) -> VoxelGrid {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    VoxelGrid::from_fn(&[n, n, n], |_, _, _| (r.random::<f64>() * 64.0).floor() / 64.0).unwrap()
}

fn matching(c: &mut Criterion) {
    let mut group = c.benchmark_group("betti_matching");
    group.sample_size(10);
    for n in [16, 32] {
        let (i, j) = (volume(n, 1), volume(n, 2));
        for (name, parallel) in [("parallel", true), ("sequential", false)] {
            let opts = Options {
                parallel,
                ..Options::default()
            };
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| compute_betti_matching(black_box(&i), black_box(&j), DimSet::ALL, true, &opts).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, matching);
criterion_main!(benches);
