//! Microbenchmarks for the hot kernels: function synthesis, the two Weyl
//! transforms, twisted operations, and the projection Grams.  All run at
//! deliberately small truncations so one iteration is milliseconds; the
//! point is tracking relative regressions, not absolute throughput.

use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;
use weylab_core::hmg::{ComboTerm, HmgEngine, SectorCombo};
use weylab_core::quat::{QuatEngine, QuatPolynomial};
use weylab_core::sets::{find_growth_translate, GridSet};
use weylab_core::{ProjectionLab, TruncationConfig};

fn small_config() -> TruncationConfig {
    TruncationConfig {
        hermite_cutoff: 16,
        buffer: 12,
        theta_samples: 32,
        quad_radius: 7.0,
        quad_points: 140,
        fock_degree: 6,
        quat_quad_points: 8,
        a_magnitude: 1.0,
        tol: 1e-10,
        seed: 1729,
    }
}

fn square_set() -> GridSet {
    GridSet::new(2, 0.7, [vec![0, 0], vec![0, -1], vec![-1, 0], vec![-1, -1]]).unwrap()
}

fn plane_kernels(c: &mut Criterion) {
    let cfg = small_config();
    let eng = HmgEngine::new(&cfg);
    let combo = SectorCombo::new([
        ComboTerm { sector: 0, j: 0, k: 1, coeff: Complex64::new(0.8, 0.1) },
        ComboTerm { sector: 1, j: 2, k: 0, coeff: Complex64::new(-0.3, 0.4) },
        ComboTerm { sector: -1, j: 1, k: 2, coeff: Complex64::new(0.2, -0.6) },
    ]);
    let g = eng.realize(&combo);

    c.bench_function("hmg_realize_three_modes", |b| b.iter(|| eng.realize(&combo)));
    c.bench_function("hmg_weyl_transform_sector0", |b| b.iter(|| eng.weyl_transform(&g, 0)));

    // Translation needs room to decay at the box edge, so shift the
    // vacuum mode rather than the wider three mode mixture.
    let vacuum = eng.realize(&SectorCombo::new([ComboTerm {
        sector: 0,
        j: 0,
        k: 0,
        coeff: Complex64::new(1.0, 0.0),
    }]));
    c.bench_function("hmg_twisted_translate", |b| {
        b.iter(|| eng.twisted_translate(&vacuum, Complex64::new(0.3, -0.2)))
    });

    let m = eng.modes();
    let mut zeta = vec![Complex64::new(0.0, 0.0); m];
    let mut eta = vec![Complex64::new(0.0, 0.0); m];
    zeta[0] = Complex64::new(1.0, 0.0);
    eta[1] = Complex64::new(1.0, 0.0);
    c.bench_function("hmg_matrix_coefficient", |b| {
        b.iter(|| eng.fourier_wigner_planes(1, &zeta, &eta))
    });
}

fn quaternion_kernels(c: &mut Criterion) {
    let cfg = small_config();
    let eng = QuatEngine::new(&cfg);
    let f = QuatPolynomial::witness(cfg.a_magnitude);
    let sampled = eng.sample(&f);

    c.bench_function("quat_weyl_transform", |b| b.iter(|| eng.weyl_transform(&sampled)));
    c.bench_function("quat_twisted_convolution", |b| {
        b.iter(|| eng.twisted_convolution(&sampled, &f))
    });
}

fn projection_kernels(c: &mut Criterion) {
    let cfg = small_config();
    let eng = HmgEngine::new(&cfg);
    let set = square_set();

    let mut group = c.benchmark_group("projection");
    group.sample_size(10);
    group.bench_function("hmg_lab_grams", |b| b.iter(|| ProjectionLab::hmg(&eng, &set)));
    let lab = ProjectionLab::hmg(&eng, &set);
    group.bench_function("hmg_hs_norms_rank4", |b| b.iter(|| lab.hs_norms(4)));
    group.bench_function("hmg_sigma_max_rank4", |b| b.iter(|| lab.sigma_max(4)));
    group.finish();
}

fn set_kernels(c: &mut Criterion) {
    let b_cells: Vec<Vec<i64>> = (0..10).map(|i| vec![i % 5, i / 5]).collect();
    let b = GridSet::new(2, 0.5, b_cells).unwrap();
    let b0 = GridSet::new(2, 0.5, [vec![0, 0], vec![1, 0]]).unwrap();
    c.bench_function("set_growth_translate", |bch| {
        bch.iter(|| find_growth_translate(&b, &b0, 0.3))
    });
}

criterion_group!(kernels, plane_kernels, quaternion_kernels, projection_kernels, set_kernels);
criterion_main!(kernels);
