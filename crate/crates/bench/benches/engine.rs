use criterion::{criterion_group, criterion_main, Criterion};
use sl2prim::brute_force::{character_table, enumerate_sl2, DEFAULT_CAP};
use sl2prim::clifford::primitive_table;
use sl2prim::extension::ExtensionProblem;
use sl2prim_bench::{representatives, ring};

fn primitive_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("primitive_table");
    group.sample_size(10);
    for spec in ["Z/2^6", "F2[t]/t^6", "Z/2^10"] {
        let ring = ring(spec);
        group.bench_function(spec, |b| b.iter(|| primitive_table(&ring).unwrap()));
    }
    group.finish();
}

fn extension_sets(c: &mut Criterion) {
    let mut group = c.benchmark_group("extension_set");
    for spec in ["Z/2^8", "F2[t]/t^8"] {
        let ring = ring(spec);
        let reps = representatives(&ring);
        group.bench_function(format!("brute {spec}"), |b| {
            b.iter(|| reps.iter().map(|&t| ExtensionProblem::new(&ring, t).unwrap().e_brute().index_over_pi_ell()).sum::<usize>())
        });
        group.bench_function(format!("fast {spec}"), |b| {
            b.iter(|| reps.iter().map(|&t| ExtensionProblem::new(&ring, t).unwrap().e_fast().unwrap().index_over_pi_ell()).sum::<usize>())
        });
    }
    group.finish();
}

fn brute_force_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("character_table");
    group.sample_size(10);
    let g = enumerate_sl2(&ring("Z/2^4"), DEFAULT_CAP).unwrap();
    group.bench_function("Z/2^4", |b| b.iter(|| character_table(&g, 1).unwrap()));
    group.finish();
}

criterion_group!(benches, primitive_tables, extension_sets, brute_force_tables);
criterion_main!(benches);
