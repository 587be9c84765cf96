use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use polyspline::kernel::{eval_kernel, KernelParams};
use polyspline::spline1d::collocation::collocation_solve;
use polyspline::spline1d::energy::energy_1d;
use polyspline::spline1d::{interpolate, solve_lagrange};
use polyspline::transfinite::fit;
use polyspline_bench::{bench_knots, bench_surface, bench_values};

fn kernel_eval(c: &mut Criterion) {
    let params = KernelParams::new(3, 2.5).unwrap();
    c.bench_function("kernel_eval_p3", |b| {
        b.iter(|| eval_kernel(black_box(&params), black_box(1.37)))
    });
}

fn lagrange_solve(c: &mut Criterion) {
    let knots = bench_knots();
    for p in [2usize, 3] {
        let params = KernelParams::new(p, 2.0).unwrap();
        c.bench_function(&format!("lagrange_solve_p{p}_n7"), |b| {
            b.iter(|| solve_lagrange(black_box(&params), black_box(&knots)).unwrap())
        });
    }
}

fn interpolate_and_energy(c: &mut Criterion) {
    let knots = bench_knots();
    let params = KernelParams::new(2, 2.0).unwrap();
    let basis = solve_lagrange(&params, &knots).unwrap();
    let values = bench_values(knots.len(), 3);
    c.bench_function("interpolate_n7", |b| {
        b.iter(|| interpolate(black_box(&basis), black_box(&values)))
    });
    let spline = interpolate(&basis, &values);
    c.bench_function("energy_exact_n7", |b| {
        b.iter(|| energy_1d(black_box(&spline)))
    });
}

fn collocation(c: &mut Criterion) {
    let knots = bench_knots();
    let values = bench_values(knots.len(), 5);
    for p in [2usize, 3] {
        let params = KernelParams::new(p, 2.0).unwrap();
        c.bench_function(&format!("collocation_solve_p{p}_n7"), |b| {
            b.iter(|| collocation_solve(black_box(&params), black_box(&knots), black_box(&values)).unwrap())
        });
    }
}

fn surface_fit_and_eval(c: &mut Criterion) {
    let (config, fdata) = bench_surface();
    c.bench_function("fit_k8_n1", |b| {
        b.iter(|| fit(black_box(&config), black_box(&fdata)).unwrap())
    });
    let model = fit(&config, &fdata).unwrap();
    let t_grid: Vec<f64> = (0..20).map(|i| -0.5 + 4.0 * i as f64 / 19.0).collect();
    let y_axis: Vec<f64> = (0..32)
        .map(|k| 2.0 * std::f64::consts::PI * k as f64 / 32.0)
        .collect();
    c.bench_function("evaluate_grid_20x32", |b| {
        b.iter(|| {
            model
                .evaluate_grid(black_box(&t_grid), black_box(std::slice::from_ref(&y_axis)), 0, &[0])
                .unwrap()
        })
    });
}

criterion_group!(
    benches,
    kernel_eval,
    lagrange_solve,
    interpolate_and_energy,
    collocation,
    surface_fit_and_eval
);
criterion_main!(benches);
