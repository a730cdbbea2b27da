use std::hint::black_box;
use std::time::Duration;

use confmap::harness::{average_fuse, make_synthetic_pair};
use confmap::perturb::apply_noise_with;
use confmap::{confidence_map, Execution, MapConfig, Noise, NoiseSpec};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn bench_confidence_map(c: &mut Criterion) {
    let mut group = c.benchmark_group("confidence_map");
    for side in [64usize, 128, 256] {
        let pair = make_synthetic_pair(side, side, 1).unwrap();
        let fused = average_fuse(&pair.structural, &pair.functional).unwrap();
        group.throughput(Throughput::Elements((side * side) as u64));
        for (name, execution) in MODES {
            let cfg = MapConfig {
                execution,
                ..MapConfig::default()
            };
            group.bench_with_input(BenchmarkId::new(name, side), &side, |b, _| {
                b.iter(|| {
                    confidence_map(black_box(&pair.structural), black_box(&fused), &cfg).unwrap()
                })
            });
        }
    }
    group.finish();
}

fn bench_noise(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_noise");
    let pair = make_synthetic_pair(512, 512, 2).unwrap();
    for noise in Noise::standard_set() {
        let spec = NoiseSpec::new(noise, 7);
        for (name, execution) in MODES {
            group.bench_function(BenchmarkId::new(name, noise.kind()), |b| {
                b.iter(|| apply_noise_with(black_box(&pair.structural), &spec, execution).unwrap())
            });
        }
    }
    group.finish();
}

fn config() -> Criterion {
    Criterion::default()
        .sample_size(20)
        .measurement_time(Duration::from_secs(3))
        .warm_up_time(Duration::from_millis(500))
}

criterion_group! {
    name = benches;
    config = config();
    targets = bench_confidence_map, bench_noise
}
criterion_main!(benches);
