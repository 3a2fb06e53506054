use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rabi_bloch::model::{build_sector_chain, initial_superposition};
use rabi_bloch::propagate::evolve_midpoint;
use rabi_bloch::{
    eigendecompose, evolve_const, evolve_schedule, ChainKind, DriveSchedule, ModelParams, ParitySector, SectorChain,
};

fn params() -> ModelParams {
    ModelParams::from_extent(28.89, 1.01e4, 0.1).unwrap()
}

fn eigen(c: &mut Criterion) {
    let p = params();
    let h = build_sector_chain(&p, ChainKind::Equivalent, ParitySector::Even).unwrap();
    c.bench_function("eigendecompose_219", |b| b.iter(|| eigendecompose(&h).unwrap()));
}

fn propagation(c: &mut Criterion) {
    let p = params();
    let t_b = p.bloch_period();
    let init = initial_superposition(&p).unwrap();
    let chain = SectorChain::new(ChainKind::Equivalent, ParitySector::Even);
    let spec = eigendecompose(&chain.build(&p, 1.0).unwrap()).unwrap();

    c.bench_function("evolve_const", |b| {
        b.iter(|| evolve_const(&init.even, &spec, 7.3 * t_b).unwrap())
    });

    let rect = DriveSchedule::Rectangular {
        period: t_b,
        width: 0.1 * t_b,
        phase: 0.0,
        amplitude: 1.0,
    };
    let dt = t_b / 4000.0;
    c.bench_function("rectangular_10_periods", |b| {
        b.iter(|| evolve_schedule(&init.even, &p, chain, &rect, &[10.0 * t_b], dt).unwrap())
    });

    // Spectra are cached per call, so each iteration pays for the cold cache.
    let sin = DriveSchedule::Sinusoidal {
        phase: 0.0,
        amplitude: 1.0,
    };
    let mut group = c.benchmark_group("sinusoid");
    group.sample_size(10);
    group.bench_function("midpoint_1_period", |b| {
        b.iter_batched(
            || init.even.clone(),
            |s| evolve_midpoint(&s, &p, chain, &sin, &[t_b], t_b / 2000.0).unwrap(),
            BatchSize::LargeInput,
        )
    });
    group.finish();
}

criterion_group!(benches, eigen, propagation);
criterion_main!(benches);
