//! Benchmarks over the library's four hot paths: canonicalization,
//! structure enumeration, arrow checking, and coordinatization.

use std::collections::BTreeMap;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use sumshuffle::coordmodel::CoordModel;
use sumshuffle::finstruct::{enumerate_structures, FinStructure};
use sumshuffle::presentation::{parse, NodePath, TreePresentation};
use sumshuffle::ramsey::{check_arrow, ArrowInstance};
use sumshuffle::canonicalize;

/// A deeply nested expression that collapses to `sigma(1)`.
fn deep_collapsing_tree(depth: usize) -> TreePresentation {
    let mut text = String::from("sigma(1)");
    for _ in 0..depth {
        text = format!("s(sigma(1),1,{text},sigma(1))");
    }
    parse(&text).expect("well-formed expression")
}

/// An `n`-point chain over `sigma(1)`.
fn chain(n: usize) -> FinStructure {
    let tree = parse("sigma(1)").expect("well-formed expression");
    let leaf: NodePath = "1".parse().expect("leaf path");
    let relations = BTreeMap::from([
        (NodePath::root(), vec![(0..n).collect::<Vec<_>>()]),
        (leaf, (0..n).map(|i| vec![i]).collect()),
    ]);
    FinStructure::new(tree, n, relations).expect("chain is well-formed")
}

fn bench_canonicalize(c: &mut Criterion) {
    let tree = deep_collapsing_tree(10);
    c.bench_function("canonicalize deep tree", |b| {
        b.iter(|| canonicalize(black_box(&tree)).expect("canonical form"))
    });
}

fn bench_enumerate(c: &mut Criterion) {
    let tree = parse("sigma(sigma(1))").expect("well-formed expression");
    c.bench_function("enumerate 6-point structures over sigma(sigma(1))", |b| {
        b.iter(|| enumerate_structures(black_box(&tree), 6, 100_000).expect("within cap"))
    });
}

fn bench_check_arrow(c: &mut Criterion) {
    let instance = ArrowInstance {
        c: chain(6),
        b: chain(3),
        a: chain(2),
        colors: 2,
    };
    c.bench_function("arrow check on a 6-chain", |b| {
        b.iter(|| check_arrow(black_box(&instance), 100).expect("within cap"))
    });
}

fn bench_coordinatize(c: &mut Criterion) {
    let structure = chain(24);
    let model = CoordModel::new(structure.tree().clone());
    c.bench_function("coordinatize a 24-chain", |b| {
        b.iter(|| model.coordinatize(black_box(&structure)).expect("valid chain"))
    });
}

criterion_group!(
    benches,
    bench_canonicalize,
    bench_enumerate,
    bench_check_arrow,
    bench_coordinatize
);
criterion_main!(benches);
