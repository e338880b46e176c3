use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use subdiv::cab::{find_cab, long_dicycle, reduce_girth, synthetic_chain_host};
use subdiv::digraph::*;
use subdiv::k3e::find_k3e;
use subdiv::menger::{strong_arc_connectivity, vertex_disjoint_paths};
use subdiv::oracle::{contains_subdivision, SearchBudget};
use subdiv::random::{random_gnp, random_k_out, rng};
use subdiv::two_block::find_two_block;

fn finders(c: &mut Criterion) {
    let mut g = c.benchmark_group("finders");
    for n in [50, 500] {
        let d = random_k_out(n, 2, &mut rng(1));
        g.bench_with_input(BenchmarkId::new("k3e", n), &d, |b, d| b.iter(|| find_k3e(black_box(d), 0, None).unwrap()));
        let d = random_k_out(n, 4, &mut rng(2));
        g.bench_with_input(BenchmarkId::new("two_block_3_2", n), &d, |b, d| {
            b.iter(|| find_two_block(black_box(d), 3, 2, &mut SearchBudget::default()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("long_dicycle", n), &d, |b, d| b.iter(|| long_dicycle(black_box(d)).unwrap()));
    }
    for (a, bb) in [(2, 1), (3, 2)] {
        let d = synthetic_chain_host(a, bb, 4).unwrap();
        g.bench_with_input(BenchmarkId::new("cab_synthetic", format!("{a},{bb}")), &d, |b, d| {
            b.iter(|| find_cab(black_box(d), a, bb, &mut SearchBudget::default()).unwrap())
        });
    }
    g.finish();
}

fn substrate(c: &mut Criterion) {
    let mut g = c.benchmark_group("substrate");
    let d = random_gnp(200, 0.05, &mut rng(3));
    g.bench_function("menger_k4_n200", |b| b.iter(|| vertex_disjoint_paths(black_box(&d), 0, 1, 4)));
    let d = random_k_out(60, 5, &mut rng(4));
    g.bench_function("arc_connectivity_n60", |b| b.iter(|| strong_arc_connectivity(black_box(&d)).unwrap()));
    let d = random_gnp(9, 0.4, &mut rng(5));
    let f = pattern_two_block(2, 2).unwrap();
    g.bench_function("oracle_twoblock_n9", |b| b.iter(|| contains_subdivision(black_box(&d), &f, &mut SearchBudget::default())));
    g.sample_size(10);
    let d = random_k_out(1000, 100, &mut rng(6));
    g.bench_function("reduce_girth_n1000", |b| b.iter(|| reduce_girth(black_box(&d), 5, 6, 0, 64).unwrap()));
    g.finish();
}

criterion_group!(benches, finders, substrate);
criterion_main!(benches);
