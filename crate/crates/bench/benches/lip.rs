//! Pointwise Lipschitz field and singular-set extraction. Cost is
//! dominated by the per-point ball scan, so it scales with n^2.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use liplab_core::{
    gen_grid, gen_random_geometric, lip_field, singular_set, ScalarField, Scale, SplitMix64,
};

fn field_for(n: usize, seed: u64) -> ScalarField {
    let mut rng = SplitMix64::new(seed);
    ScalarField::new((0..n).map(|_| 2.0 * rng.next_f64() - 1.0).collect()).unwrap()
}

fn bench_lip(c: &mut Criterion) {
    let mut group = c.benchmark_group("lip");
    group.sample_size(20);
    group.warm_up_time(Duration::from_millis(500));
    group.measurement_time(Duration::from_secs(2));
    let h = Scale::new(1.0).unwrap();

    for side in [10usize, 20, 30] {
        let space = gen_grid(side, side).unwrap();
        let f = field_for(space.n(), 7);
        group.bench_with_input(
            BenchmarkId::new("lip_field/grid", side * side),
            &(&space, &f),
            |b, (s, f)| b.iter(|| lip_field(s, f, h)),
        );
    }

    let rg = gen_random_geometric(500, 0.1, 11).unwrap();
    let f = field_for(rg.n(), 13);
    group.bench_function("lip_field/rg-500", |b| b.iter(|| lip_field(&rg, &f, h)));
    group.bench_function("singular_set/rg-500", |b| {
        b.iter(|| singular_set(&rg, &f, h, 0.25))
    });

    group.finish();
}

criterion_group!(benches, bench_lip);
criterion_main!(benches);
