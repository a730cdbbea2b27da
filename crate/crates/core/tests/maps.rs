use confmap::harness::{average_fuse, independent_noise, make_synthetic_pair};
use confmap::stats::bin_of;
use confmap::{
    apply_noise, confidence_map, mean_confidence, ConfidenceMap, Execution, GrayImage, MapConfig,
    Noise, NoiseSpec,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> MapConfig {
    MapConfig::default()
}

fn mean_map(a: &GrayImage, b: &GrayImage) -> f64 {
    mean_confidence(&confidence_map(a, b, &cfg()).unwrap(), None).unwrap()
}

/// Whether the quantized W×W mirror window at (row, col) holds a single bin.
fn window_is_flat(img: &GrayImage, row: usize, col: usize, c: &MapConfig) -> bool {
    let half = (c.patch / 2) as isize;
    let reflect = |i: isize, n: usize| -> usize {
        let p = 2 * (n as isize - 1);
        let m = i.rem_euclid(p);
        (if m < n as isize { m } else { p - m }) as usize
    };
    let mut bins = std::collections::BTreeSet::new();
    for dr in -half..=half {
        for dc in -half..=half {
            let r = reflect(row as isize + dr, img.height());
            let cc = reflect(col as isize + dc, img.width());
            bins.insert(bin_of(img.get(r, cc), c.bins));
        }
    }
    bins.len() == 1
}

#[test]
fn self_pair_scores_one_on_informative_windows() {
    for seed in 0..3 {
        let p = make_synthetic_pair(48, 40, seed).unwrap();
        for img in [&p.structural, &p.functional] {
            let m = confidence_map(img, img, &cfg()).unwrap();
            for r in 0..img.height() {
                for c in 0..img.width() {
                    let expected = if window_is_flat(img, r, c, &cfg()) {
                        0.0
                    } else {
                        1.0
                    };
                    assert_eq!(m.get(r, c), expected, "seed {seed} at ({r}, {c})");
                }
            }
        }
    }
}

#[test]
fn constant_source_scores_zero() {
    let noise = independent_noise(40, 40, 3);
    let flat = GrayImage::constant(40, 40, 0.42);
    let m = confidence_map(&flat, &noise, &cfg()).unwrap();
    assert!(m.scores().iter().all(|&s| s == 0.0));
}

#[test]
fn structured_versus_independent_noise_is_low() {
    for seed in 0..3 {
        let p = make_synthetic_pair(64, 64, seed).unwrap();
        let noise = independent_noise(64, 64, 1000 + seed);
        let mean = mean_map(&p.structural, &noise);
        assert!(mean < 0.1, "seed {seed}: {mean}");
    }
}

#[test]
fn symmetric_in_arguments() {
    for seed in 0..3 {
        let p = make_synthetic_pair(40, 40, seed).unwrap();
        let fused = average_fuse(&p.structural, &p.functional).unwrap();
        let ab = confidence_map(&p.structural, &fused, &cfg()).unwrap();
        let ba = confidence_map(&fused, &p.structural, &cfg()).unwrap();
        for (x, y) in ab.scores().iter().zip(ba.scores()) {
            assert!((x - y).abs() <= 1e-9);
        }
    }
}

#[test]
fn parallel_and_sequential_are_bit_identical() {
    let p = make_synthetic_pair(50, 37, 9).unwrap();
    let seq = MapConfig {
        execution: Execution::Sequential,
        ..cfg()
    };
    let par = MapConfig {
        execution: Execution::Parallel,
        ..cfg()
    };
    assert_eq!(
        confidence_map(&p.structural, &p.functional, &seq).unwrap(),
        confidence_map(&p.structural, &p.functional, &par).unwrap()
    );
}

#[test]
fn intensity_changes_within_a_bin_leave_the_map_unchanged() {
    let p = make_synthetic_pair(40, 40, 4).unwrap();
    let bins = cfg().bins as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let jitter = |img: &GrayImage, rng: &mut ChaCha8Rng| {
        img.map(|v| {
            let k = bin_of(v, cfg().bins) as f64;
            // any point inside the same half-open bin
            (k + rng.random_range(0.0..0.999)) / bins
        })
    };
    let a = confidence_map(&p.structural, &p.functional, &cfg()).unwrap();
    let s2 = jitter(&p.structural, &mut rng);
    let f2 = jitter(&p.functional, &mut rng);
    assert_eq!(confidence_map(&s2, &f2, &cfg()).unwrap(), a);
}

fn replace_fraction(src: &GrayImage, noise: &GrayImage, q: f64, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    GrayImage::from_fn(src.width(), src.height(), |r, c| {
        if rng.random::<f64>() < q {
            noise.get(r, c)
        } else {
            src.get(r, c)
        }
    })
}

#[test]
fn confidence_falls_as_noise_replaces_the_target() {
    for seed in 0..3 {
        let p = make_synthetic_pair(64, 64, seed).unwrap();
        let noise = independent_noise(64, 64, 500 + seed);
        let means: Vec<f64> = [0.0, 0.25, 0.5, 1.0]
            .iter()
            .map(|&q| {
                mean_map(
                    &p.structural,
                    &replace_fraction(&p.structural, &noise, q, seed),
                )
            })
            .collect();
        assert!(
            means.windows(2).all(|w| w[0] > w[1]),
            "seed {seed}: {means:?}"
        );
    }
}

#[test]
fn fused_image_prefers_its_sources() {
    for seed in 0..3 {
        let p = make_synthetic_pair(64, 64, seed).unwrap();
        let fused = average_fuse(&p.structural, &p.functional).unwrap();
        let noise = independent_noise(64, 64, 900 + seed);
        let unrelated = mean_map(&noise, &fused);
        assert!(mean_map(&p.structural, &fused) > unrelated);
        assert!(mean_map(&p.functional, &fused) > unrelated);
    }
}

#[test]
fn additive_noise_lowers_confidence_toward_both_sources() {
    for seed in 0..3 {
        let p = make_synthetic_pair(64, 64, seed).unwrap();
        let fused = average_fuse(&p.structural, &p.functional).unwrap();
        let base = (
            mean_map(&p.structural, &fused),
            mean_map(&p.functional, &fused),
        );
        for kind in ["gaussian", "poisson", "salt_pepper", "speckle"] {
            let spec = NoiseSpec::new(Noise::default_for(kind).unwrap(), seed);
            let noisy = apply_noise(&fused, &spec).unwrap();
            assert!(
                mean_map(&p.structural, &noisy) < base.0,
                "{kind} seed {seed}"
            );
            assert!(
                mean_map(&p.functional, &noisy) < base.1,
                "{kind} seed {seed}"
            );
        }
    }
}

#[test]
fn text_matrix_round_trips_a_real_map() {
    let p = make_synthetic_pair(32, 32, 2).unwrap();
    let m = confidence_map(&p.structural, &p.functional, &cfg()).unwrap();
    assert_eq!(ConfidenceMap::from_text(&m.to_text()).unwrap(), m);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn scores_stay_in_unit_interval(seed in 0u64..10_000, w in 4usize..20, h in 4usize..20, patch in prop::sample::select(vec![1usize, 3, 5, 7]), bins in 2usize..20) {
        let a = independent_noise(w, h, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let b = a.map(|v| if rng.random::<f64>() < 0.5 { v } else { rng.random() });
        let m = confidence_map(&a, &b, &MapConfig { patch, bins, execution: Execution::Parallel }).unwrap();
        prop_assert_eq!(m.dims(), (w, h));
        prop_assert!(m.scores().iter().all(|s| (0.0..=1.0).contains(s)));
    }
}
