use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use skewlink::diagnostics;
use skewlink::mcmc::{run_mh, MHConfig};
use skewlink::model::{parameter_names, Posterior, PriorSpec};
use skewlink::predict;
use skewlink::simgen;
use skewlink::{Execution, LinkFamily};

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn chains(c: &mut Criterion) {
    let data = simgen::experiment2(1).unwrap();
    let family = LinkFamily::StandardGev;
    let posterior = Posterior::new(family, &data, PriorSpec::default());
    let init = posterior.initial_point().to_theta();
    let names = parameter_names(&data, family);
    let mut group = c.benchmark_group("mh_chains");
    group.sample_size(10);
    for (label, execution) in POLICIES {
        let config = MHConfig {
            iterations: 2_000,
            burn_in: 200,
            thin: 10,
            chains: 4,
            tune: false,
            execution,
            ..MHConfig::default()
        };
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| run_mh(&posterior, black_box(&init), names.clone(), &config).unwrap())
        });
    }
    group.finish();
}

fn draws_workloads(c: &mut Criterion) {
    let data = simgen::experiment2(1).unwrap();
    let family = LinkFamily::StandardGev;
    let posterior = Posterior::new(family, &data, PriorSpec::default());
    let init = posterior.initial_point().to_theta();
    let config = MHConfig {
        iterations: 4_000,
        thin: 10,
        chains: 2,
        ..MHConfig::default()
    };
    let samples = run_mh(&posterior, &init, parameter_names(&data, family), &config).unwrap();
    let face: Vec<f64> = (0..data.n()).map(|i| 10_000.0 + i as f64).collect();

    let mut group = c.benchmark_group("dic_deviances");
    for (label, execution) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| diagnostics::draw_deviances(black_box(&samples), family, &data, execution).unwrap())
        });
    }
    group.finish();

    let mut group = c.benchmark_group("predictive_draws");
    for (label, execution) in POLICIES {
        group.bench_function(BenchmarkId::from_parameter(label), |b| {
            b.iter(|| predict::posterior_predictive(black_box(&samples), family, data.x(), Some(&face), 7, execution).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, chains, draws_workloads);
criterion_main!(benches);
