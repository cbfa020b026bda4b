use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use p1f_bench::fixtures;
use p1f_core::canon::latin_form;
use p1f_core::search::SeedSearcher;
use p1f_core::seeds::gen_seeds;
use p1f_core::ColourMode;

fn canonical_forms(c: &mut Criterion) {
    let mut g = c.benchmark_group("canon");
    for (name, l) in fixtures() {
        g.bench_function(format!("species/{name}"), |b| b.iter(|| latin_form(black_box(&l), ColourMode::LsSpecies)));
    }
    g.finish();
}

fn latin_invariants(c: &mut Criterion) {
    let mut g = c.benchmark_group("latin");
    for (name, l) in fixtures() {
        g.bench_function(format!("transversals/{name}"), |b| b.iter(|| black_box(&l).transversal_count()));
        g.bench_function(format!("nu/{name}"), |b| b.iter(|| black_box(&l).nu()));
    }
    g.finish();
}

fn search(c: &mut Criterion) {
    let mut g = c.benchmark_group("search");
    g.sample_size(10);
    g.bench_function("seeds/n7", |b| b.iter(|| gen_seeds(black_box(7)).unwrap()));
    let seeds = gen_seeds(7).unwrap();
    let searcher = SeedSearcher::new(7).unwrap();
    g.bench_function("all_seeds/n7", |b| {
        b.iter(|| seeds.seeds().iter().map(|s| searcher.run(&s.opf).0.len()).sum::<usize>())
    });
    g.finish();
}

criterion_group!(benches, canonical_forms, latin_invariants, search);
criterion_main!(benches);
