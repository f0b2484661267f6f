use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use uiwd_bench::{closed_state, scenario, skewed_policy};
use uiwd_core::{
    all_rates, apply_policy, crra_euler_oracle, estimate_eis, run_scenario, run_scenario_with,
    BumpSpec, Schedule,
};

fn policy(c: &mut Criterion) {
    let policy = skewed_policy();
    let (state, ctx) = closed_state();
    c.bench_function("apply_policy", |b| {
        b.iter(|| apply_policy(black_box(&policy), black_box(&state), black_box(&ctx)).unwrap())
    });
    c.bench_function("all_rates", |b| {
        b.iter(|| all_rates(&policy, black_box(&state), &ctx, &BumpSpec::default()).unwrap())
    });
}

fn scenarios(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_scenario");
    group.sample_size(20);
    for agents in [1usize, 64, 512] {
        let config = scenario(agents, 120, false);
        group.bench_with_input(BenchmarkId::new("parallel", agents), &config, |b, cfg| {
            b.iter(|| run_scenario(cfg).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("sequential", agents), &config, |b, cfg| {
            b.iter(|| run_scenario_with(cfg, Schedule::Sequential).unwrap())
        });
    }
    let config = scenario(64, 120, true);
    group.bench_function("parallel_with_rates/64", |b| {
        b.iter(|| run_scenario(&config).unwrap())
    });
    group.finish();
}

fn eis(c: &mut Criterion) {
    let rates: Vec<f64> = (0..10_000)
        .map(|t| 1.02 + 0.02 * (t as f64 * 0.37).sin())
        .collect();
    let growth = crra_euler_oracle(2.0, 0.98, &rates, 0.005, 1).unwrap();
    c.bench_function("estimate_eis/10k", |b| {
        b.iter(|| estimate_eis(black_box(&growth), black_box(&rates), 4).unwrap())
    });
}

criterion_group!(benches, policy, scenarios, eis);
criterion_main!(benches);
