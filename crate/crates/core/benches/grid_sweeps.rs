//! Grid sweeps on a one-thread rayon pool versus the default pool.
//! `cargo bench --no-default-features` runs the same sweeps through the
//! sequential fallback.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use quasidist::distributions::{cohen, kirkwood_rihaczek, sigma_kernel, wigner};
use quasidist::evolution::{evolve_kr_field, FreeEvolutionParams};
use quasidist::fock::{alpha_grid, cat_ket, generalized_kr, DensityMatrix};
use quasidist::states::{cat_wave, CoherentParams};
use quasidist::{PhaseGrid, PositionGrid};
use rayon::{ThreadPool, ThreadPoolBuilder};

fn pools() -> Vec<(String, ThreadPool)> {
    let all = ThreadPoolBuilder::new().build().unwrap();
    let mut v = vec![("threads=1".to_string(), ThreadPoolBuilder::new().num_threads(1).build().unwrap())];
    if all.current_num_threads() > 1 {
        v.push((format!("threads={}", all.current_num_threads()), all));
    }
    v
}

fn wavefunction_engine(c: &mut Criterion) {
    let pools = pools();
    for n in [256, 512] {
        let g = PositionGrid::spanning(-12.0, 12.0, n).unwrap();
        let pg = PhaseGrid::conjugate(&g);
        let psi = cat_wave(CoherentParams::real(3.0), &g).unwrap();
        let k0 = kirkwood_rihaczek(&psi, &pg).unwrap();
        let params = FreeEvolutionParams::new(1.0, 0.5).unwrap();
        let kernel = sigma_kernel(0.5, 1.0);
        let mut group = c.benchmark_group(format!("wave n={n}"));
        group.sample_size(10);
        for (label, pool) in &pools {
            group.bench_function(BenchmarkId::new("kr", label), |b| {
                b.iter(|| pool.install(|| kirkwood_rihaczek(black_box(&psi), &pg).unwrap()))
            });
            group.bench_function(BenchmarkId::new("wigner", label), |b| {
                b.iter(|| pool.install(|| wigner(black_box(&psi), &pg).unwrap()))
            });
            group.bench_function(BenchmarkId::new("cohen sigma=0.5", label), |b| {
                b.iter(|| pool.install(|| cohen(black_box(&psi), &kernel, &pg).unwrap()))
            });
            group.bench_function(BenchmarkId::new("evolve kr", label), |b| {
                b.iter(|| pool.install(|| evolve_kr_field(black_box(&k0), params).unwrap()))
            });
        }
        group.finish();
    }
}

fn fock_engine(c: &mut Criterion) {
    let pools = pools();
    let rho = DensityMatrix::pure(&cat_ket(CoherentParams::real(2.0), 64).unwrap()).unwrap();
    let grid = alpha_grid((-3.0, 3.0, 41), (-3.0, 3.0, 41)).unwrap();
    let mut group = c.benchmark_group("fock dim=64 41x41");
    group.sample_size(10);
    for (label, pool) in &pools {
        group.bench_function(BenchmarkId::new("generalized kr", label), |b| {
            b.iter(|| pool.install(|| generalized_kr(black_box(&rho), &grid, 1.0).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, wavefunction_engine, fock_engine);
criterion_main!(benches);
