use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jcrabi_core::berry::eig_family_with;
use jcrabi_core::fock::TruncationConfig;
use jcrabi_core::models::{ModelKind, ModelParams};
use jcrabi_core::spectra::{g_grid, spectrum_sweep_with};
use jcrabi_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn sweep(c: &mut Criterion) {
    let cfg = TruncationConfig::new(40).unwrap();
    let p = ModelParams::new(1.0, 0.0).unwrap();
    let grid = g_grid(0.0, 1.5, 0.05).unwrap();
    let mut group = c.benchmark_group("spectrum_sweep");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, grid.len()), &exec, |b, &exec| {
            b.iter(|| spectrum_sweep_with(exec, ModelKind::RabiLab, &p, &grid, 11, cfg).unwrap())
        });
    }
    group.finish();
}

fn family(c: &mut Criterion) {
    let cfg = TruncationConfig::new(30).unwrap();
    let p = ModelParams::new(1.0, 0.5).unwrap();
    let mut group = c.benchmark_group("eig_family");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 120), &exec, |b, &exec| {
            b.iter(|| eig_family_with(exec, ModelKind::RabiLab, &p, 1, 120, cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, family);
criterion_main!(benches);
