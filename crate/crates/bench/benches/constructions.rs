use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use quadgenus::constructions::{
    embed_cube, embed_cube_cycles, embed_cube_path, embed_cube_paths, embed_k2r2r,
};
use quadgenus::embedding::trace_faces;
use quadgenus::graph::make_complete_bipartite;
use quadgenus::oracle::{exhaustive_min_genus, stochastic_search, SearchBudget};

fn constructions(c: &mut Criterion) {
    let mut g = c.benchmark_group("embed");
    for r in [2, 3, 4] {
        g.bench_with_input(BenchmarkId::new("k2r2r", r), &r, |b, &r| {
            b.iter(|| embed_k2r2r(black_box(r)).unwrap())
        });
    }
    g.bench_function("cube(2,2)", |b| b.iter(|| embed_cube(2, 2).unwrap()));
    g.bench_function("cube_cycles(1,2,[2,2])", |b| {
        b.iter(|| embed_cube_cycles(1, 2, &[2, 2]).unwrap())
    });
    g.bench_function("cube_paths(1,2,[2,2])", |b| {
        b.iter(|| embed_cube_paths(1, 2, &[2, 2]).unwrap())
    });
    g.bench_function("cube_path(2,2,3) by removal", |b| {
        b.iter(|| embed_cube_path(2, 2, 3).unwrap())
    });
    g.finish();
}

fn tracing(c: &mut Criterion) {
    let e = embed_cube_cycles(2, 2, &[3]).unwrap().embedding;
    c.bench_function("trace_faces Q(2,4) x C(6)", |b| {
        b.iter(|| trace_faces(black_box(&e)).unwrap())
    });
}

fn oracle(c: &mut Criterion) {
    let k33 = make_complete_bipartite(3, 3).unwrap();
    let k44 = make_complete_bipartite(4, 4).unwrap();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("exhaustive K(3,3)", |b| {
        b.iter(|| exhaustive_min_genus(&k33, SearchBudget::default()).unwrap())
    });
    let budget = SearchBudget {
        target_genus: Some(1),
        ..SearchBudget::default()
    };
    g.bench_function("stochastic K(4,4)", |b| {
        b.iter(|| stochastic_search(&k44, budget).unwrap())
    });
    g.finish();
}

criterion_group!(benches, constructions, tracing, oracle);
criterion_main!(benches);
