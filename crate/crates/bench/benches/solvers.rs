use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use b2tsp::exact::solve_kalmanson_exact;
use b2tsp::sliding::{disassemble, h_improve, placements, WindowConfig};
use b2tsp::vrp2::{solve_vrp2_exact, to_vrp2, DEFAULT_EXACT_CAP};
use b2tsp_bench::{convex, start, uniform};

fn exact_dp(c: &mut Criterion) {
    let mut group = c.benchmark_group("kalmanson_dp");
    group.sample_size(10);
    for n in [50, 100, 200] {
        let inst = convex(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| solve_kalmanson_exact(black_box(inst)).unwrap())
        });
    }
    group.finish();
}

fn vrp2(c: &mut Criterion) {
    let mut group = c.benchmark_group("vrp2_exact");
    for n in [8, 10, 12] {
        let inst = uniform(n, 3);
        let v = to_vrp2(&inst);
        group.bench_with_input(BenchmarkId::new("whole", n), &v, |b, v| {
            b.iter(|| solve_vrp2_exact(black_box(v), DEFAULT_EXACT_CAP).unwrap())
        });
    }
    // One window instance per size, 2s + 6 entities each.
    let inst = uniform(48, 16);
    let q = start(&inst);
    for s in 3..=6 {
        let (a, b) = placements(q.tour1().len(), q.tour2().len(), s, 1)[0];
        let v = disassemble(
            &q,
            WindowConfig {
                s,
                l: 1,
                s1_start: a,
                s2_start: b,
            },
            &inst,
        )
        .unwrap();
        group.bench_with_input(BenchmarkId::new("window", s), &v, |b, v| {
            b.iter(|| solve_vrp2_exact(black_box(v), DEFAULT_EXACT_CAP).unwrap())
        });
    }
    group.finish();
}

fn sliding(c: &mut Criterion) {
    let mut group = c.benchmark_group("h_improve");
    group.sample_size(10);
    let inst = uniform(48, 16);
    let q = start(&inst);
    for (s, l) in [(4, 2), (5, 3)] {
        group.bench_function(format!("h{s}{l}"), |b| b.iter(|| h_improve(black_box(&q), s, l, &inst)));
    }
    group.finish();
}

criterion_group!(benches, exact_dp, vrp2, sliding);
criterion_main!(benches);
