use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use softaqm::aqm::{CodelParams, CodelSoftState, ConvexRedConfig, PiGains};
use softaqm::{solve_equilibrium, FluidLoad, PiControllerState, SoftTargetCurve};

fn pi_update(c: &mut Criterion) {
    let mut group = c.benchmark_group("pi_update");
    for q1 in [0.0, 0.095] {
        let curve = SoftTargetCurve::new(0.010, q1).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(q1), &curve, |b, curve| {
            let mut state = PiControllerState::new(PiGains::default(), *curve).unwrap();
            let mut q = 0.0f64;
            b.iter(|| {
                q = (q + 0.0007) % 0.05;
                black_box(state.update(black_box(q)).unwrap())
            })
        });
    }
    group.finish();
}

fn codel_step(c: &mut Criterion) {
    c.bench_function("codel_soft_step", |b| {
        let mut state = CodelSoftState::new(CodelParams::default()).unwrap();
        let mut now = 0.0f64;
        b.iter(|| {
            now += 120e-6;
            let sojourn = 0.004 + (now * 37.0).sin().abs() * 0.02;
            black_box(state.step(black_box(sojourn), now))
        })
    });
}

fn convex_red(c: &mut Criterion) {
    let cfg = ConvexRedConfig::new(0.1, 2.0).unwrap();
    c.bench_function("convex_red_pprime", |b| {
        b.iter(|| black_box(cfg.probability(black_box(0.042))))
    });
}

fn equilibrium(c: &mut Criterion) {
    let load = FluidLoad::new(40, 0.1, 1500).unwrap();
    let curve = SoftTargetCurve::new(0.010, 0.095).unwrap();
    c.bench_function("solve_equilibrium", |b| {
        b.iter(|| black_box(solve_equilibrium(&load, black_box(12.5e6), &curve).unwrap()))
    });
}

criterion_group!(benches, pi_update, codel_step, convex_red, equilibrium);
criterion_main!(benches);
