use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use grouplab::census::{CosetAutomaton, StallingsGraph, SubgroupSpec};
use grouplab::measure::{simple_random_walk, DEFAULT_CAP};
use grouplab::series::group_series;
use grouplab::walk::{estimate_drift, tree_harmonic, WalkConfig, TREE_TOLERANCE};
use grouplab::GroupSpec;

fn f2() -> GroupSpec {
    GroupSpec::free(2).unwrap()
}

fn z2_z4() -> GroupSpec {
    GroupSpec::free_product(vec![GroupSpec::cyclic(2).unwrap(), GroupSpec::cyclic(4).unwrap()]).unwrap()
}

fn groups(c: &mut Criterion) {
    let g = f2();
    c.bench_function("enumerate_sphere_f2_10", |b| b.iter(|| g.enumerate_sphere(black_box(10), DEFAULT_CAP).unwrap()));
    let h = z2_z4();
    c.bench_function("growth_rate_z2_z4", |b| b.iter(|| group_series(black_box(&h)).growth_rate().unwrap()));
}

fn walks(c: &mut Criterion) {
    let mu = simple_random_walk(&f2());
    c.bench_function("convolution_power_f2_srw_8", |b| b.iter(|| mu.power(black_box(8), DEFAULT_CAP).unwrap()));
    let cfg = WalkConfig { horizon: 1000, replicas: 200, seed: 1, stride: 0 };
    c.bench_function("drift_f2_srw_1000x200", |b| b.iter(|| estimate_drift(&mu, black_box(&cfg)).unwrap()));
    let nu = simple_random_walk(&z2_z4());
    c.bench_function("tree_harmonic_z2_z4", |b| b.iter(|| tree_harmonic(black_box(&nu), TREE_TOLERANCE).unwrap()));
}

fn census(c: &mut Criterion) {
    let g = f2();
    let kernel = SubgroupSpec::integer_kernel(&g, vec![1, -1, 1, -1]).unwrap();
    c.bench_function("integer_kernel_census_40", |b| {
        b.iter(|| CosetAutomaton::new(&kernel, 40).unwrap().census(black_box(40)).unwrap())
    });
    let words = ["a^2", "b a b^-1", "a b^3 a^-1 b"]
        .iter()
        .map(|w| match g.parse_word(w).unwrap() {
            grouplab::Element::Free(w) => w,
            _ => unreachable!(),
        })
        .collect::<Vec<_>>();
    c.bench_function("stallings_fold", |b| b.iter(|| StallingsGraph::fold(2, black_box(&words))));
}

criterion_group!(benches, groups, walks, census);
criterion_main!(benches);
