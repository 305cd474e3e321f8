use criterion::{criterion_group, criterion_main, Criterion};

use bec_lab::continuation::ContinuationPolicy;
use bec_lab::parallel::{par_map, Execution};
use bec_lab::profiles::solve_blowup;
use bec_lab::sweep::{analyze_point, solve_from_composite, SweepConfig};

fn sweep_stages(c: &mut Criterion) {
    let lambdas = vec![1e2, 1e3, 1e4, 1e5, 3e5, 1e6];
    let mut cfg = SweepConfig::new(lambdas.clone());
    cfg.policy = ContinuationPolicy { nodes: Some(4097), ..ContinuationPolicy::default() };
    let (x, n) = cfg.blowup_size();
    let blowup = solve_blowup(x, n, &cfg.policy.newton).unwrap();
    let solutions: Vec<_> = lambdas.iter().map(|l| solve_from_composite(*l, &blowup, &cfg.policy).unwrap()).collect();

    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        let name = format!("{exec:?}").to_lowercase();
        group.bench_function(format!("solve/{name}"), |b| {
            b.iter(|| par_map(exec, &lambdas, |l| solve_from_composite(*l, &blowup, &cfg.policy).unwrap()))
        });
        group.bench_function(format!("analyze/{name}"), |b| {
            b.iter(|| par_map(exec, &solutions, |s| analyze_point(s, &blowup, &cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, sweep_stages);
criterion_main!(benches);
