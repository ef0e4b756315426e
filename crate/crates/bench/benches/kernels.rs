use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use extremal_bench::{expanding_map, expanding_profile, nitsche_problem};
use extremal_core::annulus::Annulus;
use extremal_core::field::{dirichlet_energy, minimality_certificate, perturb_map, Functional};
use extremal_core::grotzsch::{critical_length, solve_boundary, DistortionGauge};
use extremal_core::radial::radial_dirichlet_energy;
use extremal_core::transform::lift_map;

fn radial(c: &mut Criterion) {
    let p = expanding_profile();
    let dom = Annulus::new(1.0, 2.0).unwrap();
    c.bench_function("radial_dirichlet_energy", |b| b.iter(|| radial_dirichlet_energy(black_box(&p), &dom)));
}

fn grid(c: &mut Criterion) {
    let mut g = c.benchmark_group("grid");
    for n in [64usize, 128, 256] {
        let m = expanding_map(n);
        g.bench_with_input(BenchmarkId::new("dirichlet_energy", n), &m, |b, m| b.iter(|| dirichlet_energy(m)));
        g.bench_with_input(BenchmarkId::new("perturb_map", n), &m, |b, m| b.iter(|| perturb_map(m, 0.05, 7)));
    }
    let m = expanding_map(64);
    g.bench_function("certificate_64_x10", |b| b.iter(|| minimality_certificate(&m, &Functional::Dirichlet, 10, 7)));
    let m = expanding_map(128);
    let polar = m.as_polar().unwrap();
    g.bench_function("lift_map_128", |b| b.iter(|| lift_map(polar)));
    g.finish();
}

fn grotzsch(c: &mut Criterion) {
    let shifted = DistortionGauge::shifted_power(2.0).unwrap();
    let p = nitsche_problem(0.25, 0.25, shifted.clone());
    c.bench_function("critical_length_shifted_power", |b| b.iter(|| critical_length(black_box(&p))));
    let p = nitsche_problem(0.25, 0.32, shifted);
    c.bench_function("solve_boundary_shifted_power", |b| b.iter(|| solve_boundary(black_box(&p))));
    let p = nitsche_problem(0.25, 0.5, DistortionGauge::power(2.0).unwrap());
    c.bench_function("solve_boundary_power", |b| b.iter(|| solve_boundary(black_box(&p))));
}

criterion_group!(benches, radial, grid, grotzsch);
criterion_main!(benches);
