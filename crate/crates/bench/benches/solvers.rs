use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use micromorph::bvp1d::{assemble, log_space, smallest_eigenvalue, solve, sweep_lc};
use micromorph::modes::{redundancy_classify, zero_energy_kernel};
use micromorph::ModelKind;
use micromorph_bench::{mm_shear_cc, sg_shear_clamped};

fn solve_stripe(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    for n in [200, 1000, 4000] {
        g.bench_with_input(BenchmarkId::new("mm-shear-cc", n), &n, |b, &n| {
            let spec = mm_shear_cc(n);
            b.iter(|| solve(&assemble(&spec).unwrap()).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("sg-shear-clamped", n), &n, |b, &n| {
            let spec = sg_shear_clamped(n);
            b.iter(|| solve(&assemble(&spec).unwrap()).unwrap())
        });
    }
    g.finish();
}

fn eigen(c: &mut Criterion) {
    let spec = mm_shear_cc(400);
    let system = assemble(&spec).unwrap();
    c.bench_function("smallest-eigenvalue/mm-shear-cc/400", |b| {
        b.iter(|| smallest_eigenvalue(&system).unwrap())
    });
}

fn sweep(c: &mut Criterion) {
    let spec = mm_shear_cc(400);
    let lc = log_space(1e-3, 1e3, 13);
    c.bench_function("sweep/mm-shear-cc/13", |b| {
        b.iter(|| sweep_lc(&spec, &lc, 4).unwrap())
    });
}

fn modes(c: &mut Criterion) {
    c.bench_function("modes/kernel", |b| {
        b.iter(|| zero_energy_kernel(ModelKind::ClassicalMicromorphic, false))
    });
    c.bench_function("modes/redundancy", |b| {
        b.iter(|| redundancy_classify(ModelKind::RelaxedMicromorphic, false).unwrap())
    });
}

criterion_group!(benches, solve_stripe, eigen, sweep, modes);
criterion_main!(benches);
