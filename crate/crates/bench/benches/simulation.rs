use criterion::{black_box, criterion_group, criterion_main, Criterion};
use spatial_sir::binomial::sample_binomial;
use spatial_sir::det::det_run;
use spatial_sir::percolation::{sir_from_percolation, PercolationSample, RandomEdges};
use spatial_sir::rng::StreamKey;
use spatial_sir::stoch::sim_run;
use spatial_sir::{InitialCondition, ModelParams, RecordPolicy, Window};
use spatial_sir_bench::{desk_params, point_source};

fn sampling(c: &mut Criterion) {
    let key = StreamKey::new(1, 0);
    c.bench_function("binomial_inversion", |b| {
        let mut t = 0u32;
        b.iter(|| {
            t = t.wrapping_add(1);
            sample_binomial(&mut key.site(0, 0, t, 0), black_box(200), 0.003)
        })
    });
    c.bench_function("binomial_btpe", |b| {
        let mut t = 0u32;
        b.iter(|| {
            t = t.wrapping_add(1);
            sample_binomial(&mut key.site(0, 0, t, 0), black_box(2000), 0.3)
        })
    });
}

fn processes(c: &mut Criterion) {
    let mut group = c.benchmark_group("processes");
    group.sample_size(10);
    let params = desk_params();
    group.bench_function("sim_run_n200_t100", |b| {
        b.iter(|| sim_run(&point_source(), &params, 100, 7, &RecordPolicy::Final))
    });
    group.bench_function("det_run_t100", |b| b.iter(|| det_run(&point_source(), 2.0, 100, &RecordPolicy::Final)));
    let small = ModelParams::new(2.0, 3).unwrap();
    let ic = InitialCondition::Point { gamma: 1.0 };
    group.bench_function("percolation_levels_box5_n3", |b| {
        let mut r = 0u64;
        b.iter(|| {
            r += 1;
            let sample = PercolationSample::new(Window::square(5), 3, RandomEdges::new(&small, 1, r));
            sir_from_percolation(&sample, &ic)
        })
    });
    group.finish();
}

criterion_group!(benches, sampling, processes);
criterion_main!(benches);
