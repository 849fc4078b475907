use cmdnls_bench::two_soliton;
use cmdnls_core::lax::{assemble_lax, bound_states, refine_bound_states};
use cmdnls_core::pde::Stepper;
use cmdnls_core::pole_ode::integrate;
use cmdnls_core::soliton::residues_at_time;
use cmdnls_core::{Method, PoleState, Quadrature, Scheme, SpectralData};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn products(c: &mut Criterion) {
    let mut g = c.benchmark_group("corr_conv");
    for k in [256, 1024, 4096] {
        let u = two_soliton(k);
        let quad = Quadrature::shared(u.grid(), Scheme::Gregory);
        let a = u.coeffs();
        g.bench_with_input(BenchmarkId::new("corr", k), &k, |b, _| b.iter(|| quad.corr(black_box(a), a)));
        g.bench_with_input(BenchmarkId::new("conv", k), &k, |b, _| b.iter(|| quad.conv(black_box(a), a)));
    }
    g.finish();
}

fn flow(c: &mut Criterion) {
    let mut g = c.benchmark_group("ifrk4_step");
    for k in [512, 2048] {
        let u = two_soliton(k);
        let stepper = Stepper::new(&u, Scheme::Gregory, Method::Ifrk4);
        g.bench_with_input(BenchmarkId::from_parameter(k), &k, |b, _| b.iter(|| stepper.step(black_box(u.coeffs()), 1e-3)));
    }
    g.finish();
}

fn spectral(c: &mut Criterion) {
    let mut g = c.benchmark_group("lax");
    g.sample_size(10);
    for k in [256, 512] {
        let u = two_soliton(k);
        g.bench_with_input(BenchmarkId::new("assemble", k), &k, |b, _| b.iter(|| assemble_lax(black_box(&u), Scheme::Gregory)));
        let lax = assemble_lax(&u, Scheme::Gregory);
        g.bench_with_input(BenchmarkId::new("eig", k), &k, |b, _| b.iter(|| bound_states(black_box(&lax)).unwrap()));
    }
    let seeds = bound_states(&assemble_lax(&two_soliton(512), Scheme::Gregory)).unwrap().bound_eigenvalues();
    let lax = assemble_lax(&two_soliton(1024), Scheme::Gregory);
    g.bench_function("refine/1024", |b| b.iter(|| refine_bound_states(black_box(&lax), &seeds).unwrap()));
    g.finish();
}

fn poles(c: &mut Criterion) {
    let data = SpectralData::new(0.0, 3.0, vec![0.0, -0.5, 1.0], vec![0.0, 1.0, -1.0]).unwrap();
    let snap = residues_at_time(&data, 0.0).unwrap();
    let state = PoleState::new(0.0, snap.poles, snap.residues.unwrap()).unwrap();
    let mut g = c.benchmark_group("poles");
    g.bench_function("factory_n3", |b| b.iter(|| residues_at_time(black_box(&data), 2.0).unwrap()));
    g.bench_function("ode_n3_t2", |b| b.iter(|| integrate(black_box(&state), 2.0, &[2.0], 1e-10).unwrap()));
    g.finish();
}

criterion_group!(benches, products, flow, spectral, poles);
criterion_main!(benches);
