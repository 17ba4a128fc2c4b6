use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use e8_core::algebra::build_structure_tensor;
use e8_core::chart::{adjoint_of_real, expm_antisymmetric, torus_decomposition, Chart};
use e8_core::region::EulerPoint;
use e8_core::roots::compute_roots;
use e8_core::verify::{verify_jacobi_stratum, JacobiMode, JacobiStratum};
use e8_core::{DIM, E8};

fn kernels(c: &mut Criterion) {
    let e8 = E8::build().unwrap();
    let cartan = e8.cartan().unwrap();
    let ext = compute_roots(&cartan, 1e-9).unwrap();
    let chart = Chart::new(&e8.adjoint, torus_decomposition(&cartan, &ext).unwrap()).unwrap();
    let p = EulerPoint::generic(0).unwrap();

    c.bench_function("structure_tensor", |b| {
        b.iter(|| build_structure_tensor(black_box(&e8.spinors)).unwrap())
    });

    let mut g = c.benchmark_group("jacobi");
    g.sample_size(20);
    g.bench_function("qqq_1000_samples", |b| {
        b.iter(|| {
            verify_jacobi_stratum(
                &e8.tensor,
                JacobiStratum::Qqq,
                JacobiMode::Sampled {
                    samples: 1000,
                    seed: black_box(0),
                },
            )
        })
    });
    g.finish();

    c.bench_function("torus_element", |b| b.iter(|| chart.torus_element(black_box(&p.y))));
    c.bench_function("subgroup_element", |b| {
        b.iter(|| chart.subgroup_element(black_box(&p.x)).unwrap())
    });

    let mut coeffs = vec![0.0; DIM];
    for (a, &flat) in cartan.flat_indices().iter().enumerate() {
        coeffs[flat] = p.y[a];
    }
    let gen = adjoint_of_real(&e8.adjoint, &coeffs);
    let mut g = c.benchmark_group("dense");
    g.sample_size(10);
    g.bench_function("expm_248", |b| {
        b.iter(|| expm_antisymmetric(black_box(&gen), 1e-12).unwrap())
    });
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
