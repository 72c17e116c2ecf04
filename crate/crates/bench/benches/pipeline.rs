use criterion::{criterion_group, criterion_main, Criterion};
use polyflow::combin::{decompose_rank_k, enumerate_rank1};
use polyflow::disk::from_trace;
use polyflow::invariants::invariants;
use polyflow::realize::{event_target, realize, RealizeConfig};
use polyflow::tracer::{build_graph, TraceConfig};
use polyflow_bench::*;
use std::hint::black_box;

fn tracing(c: &mut Criterion) {
    let cfg = TraceConfig::default();
    let mut g = c.benchmark_group("trace");
    for (name, p) in [("z2_plus_1", z2_plus_1()), ("quintic", generic_quintic()), ("real_sextic", real_sextic())] {
        g.bench_function(name, |b| b.iter(|| build_graph(black_box(&p), &cfg).unwrap()));
    }
    g.finish();

    let sg = build_graph(&real_sextic(), &cfg).unwrap();
    c.bench_function("disk_model/real_sextic", |b| b.iter(|| from_trace(black_box(&sg)).unwrap()));
}

fn analytic(c: &mut Criterion) {
    let cfg = TraceConfig::default();
    for (name, p) in [("z2_plus_1", z2_plus_1()), ("real_sextic", real_sextic())] {
        let sg = build_graph(&p, &cfg).unwrap();
        let m = from_trace(&sg).unwrap();
        c.bench_function(&format!("invariants/{name}"), |b| b.iter(|| invariants(black_box(&sg), &m).unwrap()));
    }

    let sg = build_graph(&z2_plus_1(), &cfg).unwrap();
    let m = from_trace(&sg).unwrap();
    let (inv, frozen) = invariants(&sg, &m).unwrap();
    let event = enumerate_rank1(&m).remove(0);
    let target = event_target(&inv, &event, 1e-2).unwrap();
    c.bench_function("realize/z2_plus_1", |b| b.iter(|| realize(&frozen, &inv, black_box(&target), &RealizeConfig::default()).unwrap()));
}

fn combinatorics(c: &mut Criterion) {
    let decic = decic_model();
    c.bench_function("enumerate_rank1/decic", |b| b.iter(|| enumerate_rank1(black_box(&decic))));
    let octic = octic_model();
    let target = octic_target();
    c.bench_function("decompose_rank_k/octic", |b| b.iter(|| decompose_rank_k(black_box(&octic), &target, 10_000).unwrap().unwrap()));
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = tracing, analytic, combinatorics
}
criterion_main!(benches);
