use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use tempwave_bench::{dominant_matrix, profile_with_steps};
use tempwave_core::effective::integral_residual;
use tempwave_core::linalg::LuFactorization;
use tempwave_core::{coefficients, solve_scattering, EffectiveSolution, FoldyLaxSystem, Medium};

fn lu(c: &mut Criterion) {
    let mut group = c.benchmark_group("dense_lu");
    group.sample_size(10);
    for n in [100, 400, 1000] {
        let a = dominant_matrix(n);
        let b = vec![Complex64::new(1.0, 0.0); n];
        group.bench_with_input(BenchmarkId::new("factor_solve", n), &n, |bench, _| {
            bench.iter(|| {
                let lu = LuFactorization::new(a.clone()).unwrap();
                black_box(lu.solve(&b))
            })
        });
    }
    group.finish();
}

fn foldy_lax(c: &mut Criterion) {
    let mut group = c.benchmark_group("foldy_lax");
    group.sample_size(10);
    for n in [100, 400, 1000] {
        let (params, profile) = profile_with_steps(n);
        group.bench_with_input(BenchmarkId::new("assemble", n), &n, |bench, _| {
            bench.iter(|| black_box(FoldyLaxSystem::assemble(&profile, &params).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("dense_solve", n), &n, |bench, _| {
            bench.iter(|| {
                let sys = FoldyLaxSystem::assemble(&profile, &params).unwrap();
                black_box(sys.solve().unwrap())
            })
        });
    }
    for n in [1000, 5000] {
        let (params, profile) = profile_with_steps(n);
        group.bench_with_input(BenchmarkId::new("structured_solve", n), &n, |bench, _| {
            bench.iter(|| {
                let sys = FoldyLaxSystem::matrix_free(&profile, &params).unwrap();
                black_box(sys.solve_structured().unwrap())
            })
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle");
    for n in [100, 5000] {
        let (params, profile) = profile_with_steps(n);
        let medium = Medium::from(&profile);
        group.bench_with_input(BenchmarkId::new("solve_scattering", n), &n, |bench, _| {
            bench.iter(|| black_box(solve_scattering(&medium, params.wavenumber()).unwrap()))
        });
    }
    group.finish();
}

fn effective(c: &mut Criterion) {
    let mut group = c.benchmark_group("effective");
    group.bench_function("coefficients", |bench| {
        bench.iter(|| {
            black_box(coefficients(black_box(std::f64::consts::SQRT_2), 1.0, 10.0).unwrap())
        })
    });
    let sol = EffectiveSolution::new(1.0, 1.0, 10.0).unwrap();
    group.sample_size(10);
    group.bench_function("integral_residual_2048", |bench| {
        bench.iter(|| black_box(integral_residual(&sol, 2048).unwrap()))
    });
    group.finish();
}

criterion_group!(benches, lu, foldy_lax, oracle, effective);
criterion_main!(benches);
