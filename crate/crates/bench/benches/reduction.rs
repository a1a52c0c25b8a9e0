use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hyperred_bench::corpus;
use hyperred_core::atlas::enumerate_types;
use hyperred_core::fiber::analyze_config;
use hyperred_core::tree::{build_cluster_hierarchy, naive_tree_oracle, stabilize};

fn bench_tree(c: &mut Criterion) {
    let configs = corpus(16);
    c.bench_function("stabilize_16_configs", |b| {
        b.iter(|| {
            for cfg in &configs {
                let h = build_cluster_hierarchy(cfg);
                black_box(stabilize(&h, cfg).unwrap());
            }
        })
    });
    c.bench_function("naive_oracle_16_configs", |b| {
        b.iter(|| {
            for cfg in &configs {
                black_box(naive_tree_oracle(cfg).unwrap());
            }
        })
    });
}

fn bench_pipeline(c: &mut Criterion) {
    let configs = corpus(16);
    c.bench_function("analyze_16_configs", |b| {
        b.iter(|| {
            for cfg in &configs {
                black_box(analyze_config(cfg.clone()).unwrap());
            }
        })
    });
}

fn bench_atlas(c: &mut Criterion) {
    c.bench_function("enumerate_types_g3", |b| {
        b.iter(|| black_box(enumerate_types(3).unwrap()))
    });
}

criterion_group!(benches, bench_tree, bench_pipeline, bench_atlas);
criterion_main!(benches);
