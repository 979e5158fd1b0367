use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ergodix::mixing::{weak_mixing_defect, VerdictRule};
use ergodix::spectral::{gns_build, koopman_split, CLUSTER_TOL};
use ergodix::systems::{clock_shift_system, shift_system};
use ergodix::vdc::{vdc_verdict, VectorSequence};
use ergodix::{box_window, Complex64, Homomorphism, LocalObservable, WindowSchedule};

fn window_means(c: &mut Criterion) {
    let sys = shift_system(1, 2).unwrap();
    let sz = LocalObservable::pauli(2, &[ergodix::GroupElement::zero(1)], "Z").unwrap();
    let rule = VerdictRule::default();
    let phi = Homomorphism::identity(1);
    let mut group = c.benchmark_group("weak_mixing_defect");
    for n_max in [50, 200] {
        let windows = WindowSchedule::new(1, 1, n_max, 1).unwrap().windows().unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n_max), &windows, |b, w| {
            b.iter(|| weak_mixing_defect(&sys, &sz, &sz, &phi, black_box(w), &rule).unwrap())
        });
    }
    group.finish();
}

fn koopman(c: &mut Criterion) {
    let mut group = c.benchmark_group("koopman_split");
    for q in [3, 5] {
        let sys = clock_shift_system(q).unwrap();
        let gns = gns_build(&sys).unwrap();
        group.bench_with_input(BenchmarkId::new("clock_shift", q), &sys, |b, s| {
            b.iter(|| koopman_split(black_box(s), &gns, CLUSTER_TOL).unwrap())
        });
    }
    group.finish();
}

fn van_der_corput(c: &mut Criterion) {
    let f = VectorSequence::polynomial_phase(2f64.sqrt() - 1.0, 2, vec![Complex64::new(1.0, 0.0)]).unwrap();
    let mut group = c.benchmark_group("vdc_verdict");
    group.sample_size(10);
    for n in [250, 1000] {
        let windows = vec![box_window(1, n).unwrap()];
        group.bench_with_input(BenchmarkId::from_parameter(n), &windows, |b, w| {
            b.iter(|| vdc_verdict(&f, black_box(w), None, 0.05).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, window_means, koopman, van_der_corput);
criterion_main!(benches);
