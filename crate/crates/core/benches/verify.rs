//! Compares the rayon-parallel identity scan against the sequential
//! fallback on the two-generator preset at a moderate cutoff.
//!
//! Run with `cargo bench -p basmajian-core`. The parallel path only
//! differs when the `parallel` feature (default) is enabled and more
//! than one core is available.

use criterion::{criterion_group, criterion_main, Criterion};

use basmajian_core::identity::{verify, verify_sequential};

fn bench_verify(c: &mut Criterion) {
    let rep = basmajian_core::presets::ex51()
        .unwrap()
        .with_cutoff(8);

    let mut group = c.benchmark_group("verify_ex51_cutoff8");
    group.sample_size(10);
    group.bench_function("parallel", |b| {
        b.iter(|| verify(&rep).unwrap());
    });
    group.bench_function("sequential", |b| {
        b.iter(|| verify_sequential(&rep).unwrap());
    });
    group.finish();
}

criterion_group!(benches, bench_verify);
criterion_main!(benches);
