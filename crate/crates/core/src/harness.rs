//! Synthetic source pairs and a baseline fuser for end-to-end checks.
//!
//! The structural image mimics an anatomical scan: flat shapes with sharp
//! edges over a faint texture. The functional image mimics a metabolic scan:
//! a few bright blobs near some of the shapes, heavily smoothed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::imgio::GrayImage;
use crate::perturb::gaussian_blur;

pub const MIN_FIXTURE_SIDE: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticPair {
    pub structural: GrayImage,
    pub functional: GrayImage,
    pub seed: u64,
}

#[derive(Clone, Copy, Debug)]
enum Shape {
    Rect { r0: f64, c0: f64, r1: f64, c1: f64 },
    Ellipse { cr: f64, cc: f64, ar: f64, ac: f64 },
}

impl Shape {
    fn contains(&self, r: f64, c: f64) -> bool {
        match *self {
            Shape::Rect { r0, c0, r1, c1 } => r >= r0 && r <= r1 && c >= c0 && c <= c1,
            Shape::Ellipse { cr, cc, ar, ac } => {
                ((r - cr) / ar).powi(2) + ((c - cc) / ac).powi(2) <= 1.0
            }
        }
    }

    fn center(&self) -> (f64, f64) {
        match *self {
            Shape::Rect { r0, c0, r1, c1 } => ((r0 + r1) / 2.0, (c0 + c1) / 2.0),
            Shape::Ellipse { cr, cc, .. } => (cr, cc),
        }
    }
}

pub fn make_synthetic_pair(width: usize, height: usize, seed: u64) -> Result<SyntheticPair> {
    if width < MIN_FIXTURE_SIDE || height < MIN_FIXTURE_SIDE {
        return Err(Error::invalid(format!(
            "fixture must be at least {MIN_FIXTURE_SIDE}x{MIN_FIXTURE_SIDE}, got {width}x{height}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (width as f64, height as f64);
    let side = w.min(h);

    let n_shapes = rng.random_range(5..=8);
    let shapes: Vec<(Shape, f64)> = (0..n_shapes)
        .map(|_| {
            let cr = rng.random_range(0.1 * h..0.9 * h);
            let cc = rng.random_range(0.1 * w..0.9 * w);
            let ar = rng.random_range(side / 10.0..side / 4.0);
            let ac = rng.random_range(side / 10.0..side / 4.0);
            let shape = if rng.random::<bool>() {
                Shape::Rect {
                    r0: cr - ar,
                    c0: cc - ac,
                    r1: cr + ar,
                    c1: cc + ac,
                }
            } else {
                Shape::Ellipse { cr, cc, ar, ac }
            };
            (shape, rng.random_range(0.35..0.95))
        })
        .collect();

    let texture: Vec<f64> = (0..width * height)
        .map(|_| rng.random_range(-0.04..0.04))
        .collect();
    let structural = GrayImage::from_fn(width, height, |r, c| {
        let (rf, cf) = (r as f64, c as f64);
        // later shapes paint over earlier ones
        let base = shapes
            .iter()
            .rev()
            .find(|(s, _)| s.contains(rf, cf))
            .map_or(0.12 + 0.1 * rf / h, |&(_, v)| v);
        base + texture[r * width + c]
    });

    let n_blobs = rng.random_range(2..=4);
    let blobs: Vec<(f64, f64, f64, f64)> = (0..n_blobs)
        .map(|_| {
            let (cr, cc) = shapes[rng.random_range(0..shapes.len())].0.center();
            let jitter = side / 12.0;
            (
                cr + rng.random_range(-jitter..jitter),
                cc + rng.random_range(-jitter..jitter),
                rng.random_range(side / 10.0..side / 5.0),
                rng.random_range(0.55..1.0),
            )
        })
        .collect();
    let disks = GrayImage::from_fn(width, height, |r, c| {
        blobs
            .iter()
            .filter(|&&(br, bc, rad, _)| (r as f64 - br).hypot(c as f64 - bc) <= rad)
            .map(|&(_, _, _, v)| v)
            .fold(0.08, f64::max)
    });
    let functional = gaussian_blur(&disks, (side / 20.0).max(1.5), Execution::default());

    Ok(SyntheticPair {
        structural,
        functional,
        seed,
    })
}

/// Independent uniform noise on `[0, 1)`.
pub fn independent_noise(width: usize, height: usize, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    GrayImage::from_fn(width, height, |_, _| rng.random::<f64>())
}

/// Pixel-wise mean of two images.
pub fn average_fuse(a: &GrayImage, b: &GrayImage) -> Result<GrayImage> {
    a.ensure_same_dims(b)?;
    Ok(GrayImage::from_fn(a.width(), a.height(), |r, c| {
        (a.get(r, c) + b.get(r, c)) / 2.0
    }))
}

/// Sum of squared forward differences along both axes.
pub fn gradient_energy(img: &GrayImage) -> f64 {
    let (w, h) = img.dims();
    let mut e = 0.0;
    for r in 0..h {
        for c in 0..w {
            let v = img.get(r, c);
            if c + 1 < w {
                e += (img.get(r, c + 1) - v).powi(2);
            }
            if r + 1 < h {
                e += (img.get(r + 1, c) - v).powi(2);
            }
        }
    }
    e
}
