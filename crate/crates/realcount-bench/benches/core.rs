//! Benchmarks for the hot paths: the pebble game, exact rank, the codec
//! and a small end-to-end solve.

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use realcount::codec::{canonical_form, decode_graph, encode_graph, GraphCode};
use realcount::counting::{count_by_solve, CountOptions};
use realcount::graph::three_prism;
use realcount::polysys::Model;
use realcount::rigidity::{generic_rank, pebble_game_2_3};

fn bench_pebble_game(c: &mut Criterion) {
    let prism = three_prism();
    c.bench_function("pebble_game_2_3 prism", |b| {
        b.iter(|| pebble_game_2_3(black_box(&prism)))
    });
}

fn bench_exact_rank(c: &mut Criterion) {
    let prism = three_prism();
    c.bench_function("generic_rank prism d=2", |b| {
        b.iter(|| generic_rank(black_box(&prism), 2, 1, 7))
    });
}

fn bench_codec(c: &mut Criterion) {
    let prism = three_prism();
    let code = GraphCode::parse("7916").unwrap();
    c.bench_function("decode 7916", |b| b.iter(|| decode_graph(black_box(&code))));
    c.bench_function("encode prism", |b| b.iter(|| encode_graph(black_box(&prism))));
    c.bench_function("canonical_form prism", |b| {
        b.iter(|| canonical_form(black_box(&prism)))
    });
}

fn bench_solve_triangle(c: &mut Criterion) {
    let g = realcount::graph::Graph::complete(3);
    let opts = CountOptions {
        trials: 1,
        ..CountOptions::with_seed(3)
    };
    c.bench_function("count K3 euclidean d=2", |b| {
        b.iter(|| count_by_solve(black_box(&g), 2, Model::Euclidean, &opts))
    });
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(10);
    targets = bench_pebble_game, bench_exact_rank, bench_codec, bench_solve_triangle
}
criterion_main!(benches);
