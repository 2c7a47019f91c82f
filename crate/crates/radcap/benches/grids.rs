//! Sequential against rayon-parallel execution on the same capacity and exponent workloads.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use radcap::capacity::capacity_grid;
use radcap::exec::Execution;
use radcap::exponents::{exponent_report, ExponentConfig};
use radcap::measure::MeasureProfile;
use radcap::weights::{ex1, oscillating};
use radcap::Radius;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn annuli(lo: f64, hi: f64, points: usize) -> Vec<(Radius, Radius)> {
    let step = (hi - lo) / points as f64;
    let mut out = Vec::with_capacity(points * points / 2);
    for i in 0..points {
        for j in i + 1..=points {
            out.push((Radius::from_ln(lo + i as f64 * step), Radius::from_ln(lo + j as f64 * step)));
        }
    }
    out
}

fn capacity_grids(c: &mut Criterion) {
    let mut group = c.benchmark_group("capacity_grid");
    let profiles = [
        ("ex1", MeasureProfile::from_weight(ex1(None).unwrap()).unwrap(), annuli(-4.0e9, -1.0, 40)),
        ("oscillating", MeasureProfile::from_weight(oscillating(2, None).unwrap()).unwrap(), annuli(-170.0, 170.0, 40)),
    ];
    for (name, prof, pairs) in &profiles {
        for (mode, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(*name, mode), pairs, |b, pairs| {
                b.iter(|| capacity_grid(prof, 3.0, black_box(pairs), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn exponent_scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("exponent_report");
    group.sample_size(10);
    let prof = MeasureProfile::from_weight(ex1(None).unwrap()).unwrap();
    for (mode, exec) in MODES {
        let cfg = ExponentConfig { exec, ..ExponentConfig::default() };
        group.bench_function(BenchmarkId::new("ex1", mode), |b| b.iter(|| exponent_report(black_box(&prof), &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, capacity_grids, exponent_scans);
criterion_main!(benches);
