use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fractel::fracops::{caputo_l1, SampledTrajectory, TimeGrid};
use fractel::mlfunc::ml;
use fractel::spectral::solve;
use fractel::{Complex64, SpectralOperator, TelegraphProblem};

fn mittag_leffler(c: &mut Criterion) {
    let mut g = c.benchmark_group("ml");
    for (name, z) in [
        ("series", Complex64::new(-1.0, 0.5)),
        ("contour", Complex64::new(-20.0, 3.0)),
        ("asymptotic", Complex64::new(-1e4, 0.0)),
    ] {
        g.bench_with_input(BenchmarkId::new("rho0.5", name), &z, |b, z| {
            b.iter(|| ml(0.5, 1.0, black_box(*z), 1e-13).unwrap())
        });
    }
    g.finish();
}

fn laplacian(modes: usize) -> TelegraphProblem {
    let op = SpectralOperator::laplacian_1d(std::f64::consts::PI, modes).unwrap();
    let phi0 = (1..=modes).map(|k| Complex64::new(1.0 / (k * k) as f64, 0.0)).collect();
    let phi1 = (1..=modes).map(|k| Complex64::new(1.0 / (k * k * k) as f64, 0.0)).collect();
    TelegraphProblem::unforced(0.5, 1.0, 1.0, op, phi0, phi1).unwrap()
}

fn spectral_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("solve");
    g.sample_size(20);
    for k in [16, 64, 256] {
        let p = laplacian(k);
        g.bench_with_input(BenchmarkId::new("laplacian", k), &p, |b, p| b.iter(|| solve(black_box(p)).unwrap()));
    }
    g.finish();
}

fn l1_derivative(c: &mut Criterion) {
    let mut g = c.benchmark_group("caputo_l1");
    g.sample_size(20);
    for n in [400, 1600] {
        let traj = SampledTrajectory::from_real_fn(TimeGrid::new(1.0, n).unwrap(), |t| t.powf(0.5));
        g.bench_with_input(BenchmarkId::from_parameter(n), &traj, |b, tr| {
            b.iter(|| caputo_l1(black_box(tr), 0.5).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, mittag_leffler, spectral_solve, l1_derivative);
criterion_main!(benches);
