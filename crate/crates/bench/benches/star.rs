use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ncgeom_bench::{moyal_r3, poly_pairs, twists};
use ncgeom_core::hopf::expand_twist;
use ncgeom_core::star::{star_fn, StarContext};

fn twist_expansion(c: &mut Criterion) {
    let mut group = c.benchmark_group("expand_twist");
    for order in [2, 4] {
        for (name, spec) in twists() {
            group.bench_with_input(BenchmarkId::new(name, order), &order, |b, &n| b.iter(|| expand_twist(&spec, n).unwrap()));
        }
    }
    group.bench_function("moyal_r3/4", |b| {
        let spec = moyal_r3();
        b.iter(|| expand_twist(&spec, 4).unwrap())
    });
    group.finish();
}

fn star_products(c: &mut Criterion) {
    let pairs = poly_pairs(16);
    let mut group = c.benchmark_group("star_fn");
    for (name, spec) in twists() {
        let ctx = StarContext::new(&spec, 4).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| {
                for (f, g) in &pairs {
                    star_fn(f, g, &ctx).unwrap();
                }
            })
        });
    }
    group.finish();
}

criterion_group!(benches, twist_expansion, star_products);
criterion_main!(benches);
