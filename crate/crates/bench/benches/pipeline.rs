use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use num_bigint::BigInt;
use qtoric::exactmath::{rat_int, smith_normal_form, IntMatrix};
use qtoric::series::{small_i, ZWindow};
use qtoric::Analysis;
use qtoric_bench::{hirzebruch, local_p2, p4};

fn bench_small_i(c: &mut Criterion) {
    let mut group = c.benchmark_group("small_i");
    for (name, p, d_max) in [
        ("p4_d3", p4(), 3),
        ("local_p2_d6", local_p2(), 6),
        ("f1_d3", hirzebruch(), 3),
    ] {
        let analysis = Analysis::new(p, None).expect("stable model");
        group.bench_function(name, |b| {
            b.iter(|| {
                let series = small_i(&analysis, &rat_int(d_max), ZWindow::Auto).unwrap();
                black_box(series.terms.len())
            })
        });
    }
    group.finish();
}

fn bench_analysis(c: &mut Criterion) {
    c.bench_function("analysis_build_f1", |b| {
        b.iter(|| {
            let analysis = Analysis::new(black_box(hirzebruch()), None).unwrap();
            black_box(analysis.sectors().len())
        })
    });
}

fn bench_snf(c: &mut Criterion) {
    let m = IntMatrix::from_rows(&[
        vec![6, 4, -2, 9],
        vec![4, 6, 2, -7],
        vec![2, 2, 8, 3],
        vec![-5, 1, 0, 12],
    ])
    .unwrap();
    c.bench_function("snf_4x4", |b| {
        b.iter(|| {
            let snf = smith_normal_form(black_box(&m));
            black_box(
                snf.diagonal
                    .last()
                    .cloned()
                    .unwrap_or_else(|| BigInt::from(0)),
            )
        })
    });
}

criterion_group!(benches, bench_small_i, bench_analysis, bench_snf);
criterion_main!(benches);
