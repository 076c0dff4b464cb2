//! Engine benchmarks: property parsing, monitor synthesis and offline
//! checking throughput over the generated workload shapes.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use ltl4c_core::gen::{self, Shape};
use ltl4c_core::monitor::{synthesize, SynthOptions};
use ltl4c_core::parse_property;
use ltl4c_core::pipeline::{Pipeline, PipelineOptions};

const LOGIN: &str = "forall x : user(x) => exists[<=3] r : rid(r) => (login && unauthorized)";

fn bench_parse(c: &mut Criterion) {
    let mut group = c.benchmark_group("parse");
    let cases = [
        ("login", LOGIN),
        ("sockets", Shape::Sockets.property_text()),
        ("nested", "forall a : p(a) => exists[>=2] b : q(b) => G ((x -> F y) && X !z)"),
    ];
    for (name, text) in cases {
        group.bench_function(name, |b| b.iter(|| parse_property(std::hint::black_box(text))));
    }
    group.finish();
}

fn bench_synthesize(c: &mut Criterion) {
    let mut group = c.benchmark_group("synthesize");
    let cases = [
        ("response", "G (receive -> F respond)"),
        ("choice", "G a || (b U c)"),
        ("layered", "(a U (b U (c U d))) && G (a -> X b)"),
    ];
    for (name, text) in cases {
        let property = parse_property(&format!("forall v : g(v) => {text}")).unwrap();
        group.bench_function(name, |b| {
            b.iter(|| synthesize(std::hint::black_box(&property.body), SynthOptions::default()))
        });
    }
    group.finish();
}

fn bench_check(c: &mut Criterion) {
    let mut group = c.benchmark_group("check");
    group.sample_size(10);
    for shape in [Shape::Sockets, Shape::Chunks, Shape::Cache] {
        let events = 1 << 16;
        let property = parse_property(shape.property_text()).unwrap();
        let trace: Vec<_> = gen::trace(shape, 1, events).collect();
        group.throughput(Throughput::Elements(events));
        group.bench_with_input(BenchmarkId::new(shape.name(), events), &trace, |b, trace| {
            b.iter(|| {
                let mut pipeline =
                    Pipeline::new(property.clone(), PipelineOptions::default()).unwrap();
                for chunk in trace.chunks(8192) {
                    pipeline.feed(chunk);
                }
                pipeline.verdict()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_parse, bench_synthesize, bench_check);
criterion_main!(benches);
