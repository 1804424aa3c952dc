//! The two shortest-path routes on the space families the test suite
//! leans on. Dijkstra-per-source should win on sparse graphs; the gap
//! narrows as edges densify.

use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use liplab_core::{
    gen_grid, gen_path, gen_random_geometric, length_distance, length_distance_floyd_warshall,
};

fn bench_apsp(c: &mut Criterion) {
    let mut group = c.benchmark_group("apsp");
    group.sample_size(10);
    group.warm_up_time(Duration::from_millis(500));
    group.measurement_time(Duration::from_secs(2));

    for n in [100usize, 300, 600] {
        let path = gen_path(n).unwrap();
        group.bench_with_input(BenchmarkId::new("dijkstra/path", n), &path, |b, s| {
            b.iter(|| length_distance(s))
        });
        group.bench_with_input(BenchmarkId::new("floyd-warshall/path", n), &path, |b, s| {
            b.iter(|| length_distance_floyd_warshall(s))
        });
    }

    let grid = gen_grid(20, 20).unwrap();
    group.bench_function("dijkstra/grid-20x20", |b| b.iter(|| length_distance(&grid)));
    group.bench_function("floyd-warshall/grid-20x20", |b| {
        b.iter(|| length_distance_floyd_warshall(&grid))
    });

    let rg = gen_random_geometric(400, 0.15, 42).unwrap();
    group.bench_function("dijkstra/rg-400", |b| b.iter(|| length_distance(&rg)));
    group.bench_function("floyd-warshall/rg-400", |b| {
        b.iter(|| length_distance_floyd_warshall(&rg))
    });

    group.finish();
}

criterion_group!(benches, bench_apsp);
criterion_main!(benches);
