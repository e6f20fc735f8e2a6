use criterion::{black_box, criterion_group, criterion_main, BatchSize, Criterion};
use graspmc_core::experiment::{kameleon_preset, prepare_spec, run_random, Setup};
use graspmc_core::geometry::rim_scores;
use graspmc_core::sampler::{chain_rng, KameleonConfig, RwConfig, SamplerConfig};
use graspmc_core::{proposal_covariance, KernelConfig, ObjectKind, ObjectSpec, State, Subsample, SyntheticObject};
use rand::Rng;

fn covariance(c: &mut Criterion) {
    let mut rng = chain_rng(1);
    let kernel = KernelConfig::new(0.5, 1.0).unwrap();
    let y = State::from_fn(|_, _| rng.random::<f64>());
    let mut group = c.benchmark_group("proposal_covariance");
    for n in [50, 200] {
        let z = Subsample((0..n).map(|_| State::from_fn(|_, _| rng.random::<f64>())).collect());
        group.bench_function(format!("n={n}"), |b| {
            b.iter(|| proposal_covariance(black_box(&z), black_box(&y), 1e-4, 0.97, &kernel).unwrap())
        });
    }
    group.finish();
}

fn rims(c: &mut Criterion) {
    let spec = ObjectSpec::new(ObjectKind::Plate, 0.12, 2000, 7);
    let cloud = SyntheticObject::generate(&spec).unwrap().cloud;
    c.bench_function("rim_scores/plate-2000", |b| b.iter(|| rim_scores(black_box(&cloud), 0.015)));
}

fn chains(c: &mut Criterion) {
    let obj = prepare_spec(&ObjectSpec::new(ObjectKind::Plate, 0.12, 2000, 7), &Setup::default()).unwrap();
    let kameleon = SamplerConfig::Kameleon(KameleonConfig {
        n_iters: 500,
        burn_in: 100,
        ..kameleon_preset()
    });
    let rw = SamplerConfig::Rw(RwConfig {
        n_iters: 500,
        ..RwConfig::default()
    });
    let mut group = c.benchmark_group("chain-500");
    group.sample_size(10);
    for (name, cfg) in [("kameleon", &kameleon), ("rw", &rw)] {
        let mut seed = 0;
        group.bench_function(name, |b| {
            b.iter_batched(
                || {
                    seed += 1;
                    seed
                },
                |s| run_random(&obj, cfg, s),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, covariance, rims, chains);
criterion_main!(benches);
