use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shrinkspec::geometry::RadialDensity;
use shrinkspec::shrinker::{scan_miss, shoot_torus, ShooterConfig};
use shrinkspec::spectral::solve_all_modes;
use shrinkspec::Execution;

const POLICIES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn modes(c: &mut Criterion) {
    let shot = shoot_torus(&ShooterConfig::for_c(-1.0), 1024).expect("shooting succeeds");
    let density = RadialDensity::gaussian_at_origin(0.0, -1.0);
    let mut g = c.benchmark_group("solve_all_modes");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        g.bench_with_input(BenchmarkId::new(name, 1024), &exec, |b, &exec| {
            b.iter(|| solve_all_modes(&shot.curve, &density, 8, 10, exec).expect("modes converge"))
        });
    }
    g.finish();
}

fn scan(c: &mut Criterion) {
    let mut g = c.benchmark_group("scan_miss");
    g.sample_size(10);
    for (name, exec) in POLICIES {
        let cfg = ShooterConfig { exec, ..ShooterConfig::for_c(-1.0) };
        g.bench_with_input(BenchmarkId::new(name, cfg.scan_samples), &cfg, |b, cfg| {
            b.iter(|| scan_miss(cfg).expect("scan runs"))
        });
    }
    g.finish();
}

criterion_group!(benches, modes, scan);
criterion_main!(benches);
